//! Pointwise defect of the radial equation on stored samples.
//!
//! The flux `P = r^{n-1} (v^m/m)'` is rebuilt from `(r, v, v')` at each node
//! and `P'` is taken from a seven-point finite-difference stencil; the values
//! themselves are never differenced twice.

use crate::equation::RadialEquation;
use crate::inversion::{Profile, RadialSamples};

const ROUNDING: f64 = 16.0;

/// Weights of the first derivative at `z` for nodes `x` (Fornberg's
/// recursion).
pub fn fd_weights(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// `(r, defect)` at every node with a full centred stencil.
///
/// The defect is `|P' + S|` divided by the sum of the magnitudes of the
/// terms of the equation, `r^{n-1}|(v^m/m)''| + (n-1) r^{n-2}|(v^m/m)'|
/// + r^w(|a v| + |b r v'|)`. The rounding bound of the stencil,
/// `ROUNDING * eps * sum |w_k P_k|`, is subtracted first: where steps shrink
/// to `1e-13 r` (next to a zero of the profile) it alone reaches `1e-3`.
pub fn sample_defects(eq: &RadialEquation, s: &RadialSamples) -> Vec<(f64, f64)> {
    let len = s.len();
    let half = if len >= 7 { 3 } else { 2 };
    if len < 2 * half + 1 {
        return Vec::new();
    }
    let flux: Vec<f64> = (0..len)
        .map(|i| eq.flux_from_deriv(s.radii[i], s.values[i], s.derivs[i]))
        .collect();
    let mut out = Vec::with_capacity(len - 2 * half);
    for i in half..len - half {
        let r = s.radii[i];
        let window = &s.radii[i - half..=i + half];
        let w = fd_weights(r, window);
        let terms = w.iter().zip(&flux[i - half..=i + half]).map(|(a, b)| a * b);
        let (dflux, spread) = terms.fold((0.0, 0.0), |(s, t), x: f64| (s + x, t + x.abs()));
        let rounding = ROUNDING * f64::EPSILON * spread;
        let (v, dv) = (s.values[i], s.derivs[i]);
        let source = eq.source(r, v, dv);
        let radial = (eq.dim() - 1.0) * flux[i] / r;
        let scale = (dflux - radial).abs() + radial.abs() + eq.source_scale(r, v, dv);
        let defect = if scale > 0.0 { ((dflux + source).abs() - rounding).max(0.0) / scale } else { 0.0 };
        out.push((r, defect));
    }
    out
}

/// Largest relative defect of the profile equation over interior nodes.
pub fn ode_residual(profile: &Profile) -> f64 {
    let eq = RadialEquation::for_f(&profile.params);
    sample_defects(&eq, &profile.f_samples())
        .into_iter()
        .map(|(_, d)| d)
        .fold(0.0, f64::max)
}

/// Same as [`ode_residual`], also returning where the maximum sits.
pub fn ode_residual_at(profile: &Profile) -> (f64, f64) {
    let eq = RadialEquation::for_f(&profile.params);
    sample_defects(&eq, &profile.f_samples())
        .into_iter()
        .fold((0.0, f64::NAN), |acc, (r, d)| if d > acc.0 { (d, r) } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::Variable;
    use crate::params::derive_params;

    #[test]
    fn weights_differentiate_polynomials() {
        let x = [0.9, 1.0, 1.07, 1.15, 1.2, 1.31, 1.4];
        let w = fd_weights(1.15, &x);
        let d: f64 = w.iter().zip(&x).map(|(a, b)| a * b.powi(6)).sum();
        assert!((d - 6.0 * 1.15f64.powi(5)).abs() < 1e-10);
    }

    fn bubble_samples(radii: Vec<f64>) -> RadialSamples {
        let values = radii.iter().map(|r| (1.0 + r * r / 16.0).powi(-3)).collect();
        let derivs = radii.iter().map(|r| -0.375 * r * (1.0 + r * r / 16.0).powi(-4)).collect();
        RadialSamples { variable: Variable::F, radii, values, derivs }
    }

    #[test]
    fn explicit_solution_has_small_defect() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let eq = RadialEquation::for_f(&p);
        let radii: Vec<f64> = (0..400).map(|i| 0.01 * 1.02f64.powi(i)).collect();
        let d = sample_defects(&eq, &bubble_samples(radii));
        let worst = d.iter().map(|x| x.1).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{worst}");
    }

    #[test]
    fn perturbation_is_detected() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let eq = RadialEquation::for_f(&p);
        let radii: Vec<f64> = (0..400).map(|i| 0.01 * 1.02f64.powi(i)).collect();
        let mut s = bubble_samples(radii);
        s.values[200] *= 1.01;
        let worst = sample_defects(&eq, &s).iter().map(|x| x.1).fold(0.0, f64::max);
        assert!(worst > 1e-3, "{worst}");
    }
}
