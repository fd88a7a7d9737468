//! The inversion `g(r) = r^{-(n-2)/m} f(1/r)` between origin and far-field
//! problems, and the sampled profile type shared by the solvers.

use serde::{Deserialize, Serialize};

use crate::equation::{RadialEquation, Variable};
use crate::error::{Error, Result};
use crate::integrate::TerminalEvent;
use crate::params::ProfileParams;

/// Radial samples of `f` or `g` with their first derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSamples {
    pub variable: Variable,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl RadialSamples {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// `(v, v')` at `r` inside the sampled range by quintic Hermite
    /// interpolation, with `v''` taken from `eq` at each node.
    pub fn eval(&self, eq: &RadialEquation, r: f64) -> Option<(f64, f64)> {
        interpolate(eq, &self.radii, &self.values, &self.derivs, r)
    }
}

fn interpolate(eq: &RadialEquation, radii: &[f64], values: &[f64], derivs: &[f64], r: f64) -> Option<(f64, f64)> {
    let len = radii.len();
    if len == 0 || !(r >= radii[0] && r <= radii[len - 1]) {
        return None;
    }
    if len == 1 {
        return Some((values[0], derivs[0]));
    }
    let node = |i: usize| {
        let (x, v, d) = (radii[i], values[i], derivs[i]);
        (x, v, d, eq.second_derivative(x, v, d))
    };
    let i = radii.partition_point(|x| *x <= r).saturating_sub(1).min(len - 2);
    Some(hermite5(node(i), node(i + 1), r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Prescribed `f(0) = eta0`.
    Origin,
    /// Prescribed `r^{(n-2)/m} f(r) -> eta` as `r -> infinity`.
    FarField,
}

/// A solved profile `f`, sampled on strictly increasing radii.
#[derive(Debug, Clone)]
pub struct Profile {
    pub kind: ProfileKind,
    pub params: ProfileParams,
    /// `eta0` for origin profiles, `eta` for far-field profiles.
    pub boundary: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// The inverted samples `g` a far-field profile was computed from.
    pub inverted: Option<RadialSamples>,
    pub terminal_event: TerminalEvent,
    /// Largest relative jump between local and continued solution.
    pub seam_mismatch: f64,
    pub eps: f64,
    pub tol: f64,
    pub rejected_steps: usize,
}

impl Profile {
    pub fn from_samples(
        kind: ProfileKind,
        params: ProfileParams,
        boundary: f64,
        f: RadialSamples,
        inverted: Option<RadialSamples>,
    ) -> Self {
        debug_assert_eq!(f.variable, Variable::F);
        Profile {
            kind,
            params,
            boundary,
            radii: f.radii,
            values: f.values,
            derivs: f.derivs,
            inverted,
            terminal_event: TerminalEvent::ReachedRmax,
            seam_mismatch: 0.0,
            eps: f64::NAN,
            tol: f64::NAN,
            rejected_steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn f_samples(&self) -> RadialSamples {
        RadialSamples {
            variable: Variable::F,
            radii: self.radii.clone(),
            values: self.values.clone(),
            derivs: self.derivs.clone(),
        }
    }

    /// Samples of the variable the solver actually integrated.
    pub fn solved_samples(&self) -> RadialSamples {
        match &self.inverted {
            Some(g) => g.clone(),
            None => self.f_samples(),
        }
    }

    /// Smallest and largest radius at which [`Profile::eval`] is defined.
    pub fn range(&self) -> (f64, f64) {
        let lo = match self.kind {
            ProfileKind::Origin => 0.0,
            ProfileKind::FarField => self.radii[0],
        };
        (lo, *self.radii.last().unwrap())
    }

    /// `(f, f')` at `r` by quintic Hermite interpolation, using `f''` from the
    /// equation at each node. Origin profiles extend down to `r = 0`.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(r >= lo && r <= hi) {
            return None;
        }
        let eq = RadialEquation::for_f(&self.params);
        if r < self.radii[0] {
            let curv = -self.params.alpha() / self.params.dim() * self.boundary.powf(2.0 - self.params.m());
            let first = (self.radii[0], self.values[0], self.derivs[0]);
            let b = (first.0, first.1, first.2, eq.second_derivative(first.0, first.1, first.2));
            return Some(hermite5((0.0, self.boundary, 0.0, curv), b, r));
        }
        interpolate(&eq, &self.radii, &self.values, &self.derivs, r)
    }
}

fn hermite5(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64), x: f64) -> (f64, f64) {
    let h = b.0 - a.0;
    let t = (x - a.0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let v = h0 * a.1 + h * h1 * a.2 + h * h * h2 * a.3 + h5 * b.1 + h * h4 * b.2 + h * h * h3 * b.3;
    let dv = (d0 * a.1 + h * d1 * a.2 + h * h * d2 * a.3 + d5 * b.1 + h * d4 * b.2 + h * h * d3 * b.3) / h;
    (v, dv)
}

/// Maps samples of `g` to samples of `f` (or back), sorted by radius.
///
/// `f(r) = r^{-a} g(1/r)`, `f'(r) = -r^{-a-1} (a g(1/r) + g'(1/r)/r)` with
/// `a = (n-2)/m`; the map is its own inverse.
pub fn invert_pointwise(s: &RadialSamples, p: &ProfileParams) -> Result<RadialSamples> {
    if let Some(bad) = s.radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::domain(format!("sample radius {bad} violates r > 0")));
    }
    let a = p.fast_exponent();
    let len = s.len();
    let mut radii = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    let mut derivs = Vec::with_capacity(len);
    for i in (0..len).rev() {
        let x = s.radii[i];
        let r = 1.0 / x;
        let scale = x.powf(a);
        radii.push(r);
        values.push(scale * s.values[i]);
        derivs.push(-scale * x * (a * s.values[i] + x * s.derivs[i]));
    }
    let variable = match s.variable {
        Variable::F => Variable::G,
        Variable::G => Variable::F,
    };
    Ok(RadialSamples { variable, radii, values, derivs })
}

/// Applies [`invert_pointwise`] twice.
pub fn roundtrip(s: &RadialSamples, p: &ProfileParams) -> Result<RadialSamples> {
    invert_pointwise(&invert_pointwise(s, p)?, p)
}

/// What a far-field datum `eta` prescribes on either side of the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldData {
    pub eta: f64,
    /// `g(0)`.
    pub g_origin: f64,
    /// `lim r^{(n-2)/m} f(r)`.
    pub limit_value: f64,
    /// `lim r^{(n-2)/m + 1} f'(r)`.
    pub limit_flux: f64,
    /// `f(r) < eta r^{-decay_exponent}` for all `r > 0`.
    pub decay_exponent: f64,
}

pub fn boundary_dictionary(p: &ProfileParams, eta: f64) -> FarFieldData {
    let a = p.fast_exponent();
    FarFieldData {
        eta,
        g_origin: eta,
        limit_value: eta,
        limit_flux: -a * eta,
        decay_exponent: a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn samples(radii: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> RadialSamples {
        RadialSamples { variable: Variable::G, radii, values, derivs }
    }

    #[test]
    fn constant_maps_to_power() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let g = samples(vec![0.5, 1.0, 2.0], vec![1.0; 3], vec![0.0; 3]);
        let f = invert_pointwise(&g, &p).unwrap();
        assert_eq!(f.variable, Variable::F);
        assert_eq!(f.radii, vec![0.5, 1.0, 2.0]);
        for (r, v) in f.radii.iter().zip(&f.values) {
            assert!((v - r.powi(-6)).abs() < 1e-12 * r.powi(-6));
        }
        for (r, d) in f.radii.iter().zip(&f.derivs) {
            assert!((d + 6.0 * r.powi(-7)).abs() < 1e-12 * r.powi(-7));
        }
        assert_eq!(f.values[1], 1.0);
    }

    #[test]
    fn explicit_pair_maps_exactly() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let radii: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
        let g = samples(
            radii.clone(),
            radii.iter().map(|r| (r * r + 1.0 / 16.0).powi(-3)).collect(),
            radii.iter().map(|r| -6.0 * r * (r * r + 1.0 / 16.0).powi(-4)).collect(),
        );
        let f = invert_pointwise(&g, &p).unwrap();
        for ((r, v), d) in f.radii.iter().zip(&f.values).zip(&f.derivs) {
            let q = 1.0 + r * r / 16.0;
            assert!((v / q.powi(-3) - 1.0).abs() < 1e-12);
            assert!((d / (-0.375 * r * q.powi(-4)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_node_roundtrip() {
        let p = derive_params(3, 0.25, 1.0, 0.0).unwrap();
        let g = samples(vec![2.0], vec![5.0], vec![-1.0]);
        let back = roundtrip(&g, &p).unwrap();
        assert!((back.radii[0] - 2.0).abs() < 1e-15);
        assert!((back.values[0] - 5.0).abs() < 1e-14);
        assert!((back.derivs[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let p = derive_params(3, 0.25, 1.0, 0.0).unwrap();
        let g = samples(vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]);
        assert!(matches!(invert_pointwise(&g, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn dictionary_entries() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let d = boundary_dictionary(&p, 4096.0);
        assert_eq!(d.g_origin, 4096.0);
        assert!((d.limit_flux + 24576.0).abs() < 1e-9);
        let p = derive_params(3, 0.25, 1.0, 0.0).unwrap();
        assert!((boundary_dictionary(&p, 1.0).decay_exponent - 4.0).abs() < 1e-15);
    }

    pub(crate) fn random_samples(seed: u64, len: usize) -> RadialSamples {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut radii: Vec<f64> = (0..len).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let n = radii.len();
        samples(
            radii,
            (0..n).map(|_| 10f64.powf(rng.gen_range(-5.0..5.0))).collect(),
            (0..n).map(|_| rng.gen_range(-1e3..1e3)).collect(),
        )
    }

    #[test]
    fn random_sets_roundtrip() {
        let p = derive_params(5, 0.3, 1.0, 0.1).unwrap();
        for seed in 0..100 {
            let g = random_samples(seed, 1000);
            let back = roundtrip(&g, &p).unwrap();
            for i in 0..g.len() {
                assert!((back.radii[i] / g.radii[i] - 1.0).abs() <= 1e-12);
                assert!((back.values[i] / g.values[i] - 1.0).abs() <= 1e-12);
                let scale = g.derivs[i].abs().max(g.values[i] / g.radii[i]);
                assert!((back.derivs[i] - g.derivs[i]).abs() <= 1e-12 * scale);
            }
        }
    }

    proptest! {
        #[test]
        fn involution(
            r in 1e-2f64..1e2,
            v in 1e-6f64..1e6,
            d in -1e3f64..1e3,
            mf in 0.2f64..0.95,
            n in 3u32..7,
        ) {
            let m = mf * f64::from(n - 2) / f64::from(n);
            let p = derive_params(n, m, 1.0, 0.0).unwrap();
            let back = roundtrip(&samples(vec![r], vec![v], vec![d]), &p).unwrap();
            prop_assert!((back.values[0] / v - 1.0).abs() <= 1e-12);
            prop_assert!((back.derivs[0] - d).abs() <= 1e-12 * d.abs().max(v / r));
        }
    }
}
