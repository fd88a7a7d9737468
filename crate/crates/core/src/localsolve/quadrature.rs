//! Cumulative integrals `I(r_j) = int_0^{r_j} rho^p F(rho) d rho` on a graded
//! grid `r_j = eps (j/J)^gamma`.
//!
//! In the index variable `t = j/J` the integrand is
//! `eps^{p+1} gamma t^q F`, `q = gamma (p+1) - 1 > -1`. On each cell `F` is
//! replaced by its cubic interpolant in `t` through four neighbouring nodes
//! and the weight `t^q` is integrated exactly against it: analytically on the
//! first cell, by Gauss–Legendre on geometric sub-cells elsewhere. The rule is
//! exact for `F` cubic in `t` whatever the power.

const GAUSS_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

#[derive(Debug, Clone)]
pub struct GradedGrid {
    pub eps: f64,
    pub gamma: f64,
    /// Radii `r_0 = 0 < r_1 < ... < r_J = eps`.
    pub r: Vec<f64>,
}

impl GradedGrid {
    pub fn new(eps: f64, gamma: f64, cells: usize) -> Self {
        assert!(cells >= 4, "graded grid needs at least 4 cells");
        let jf = cells as f64;
        let r = (0..=cells)
            .map(|j| eps * (j as f64 / jf).powf(gamma))
            .collect();
        GradedGrid { eps, gamma, r }
    }

    pub fn cells(&self) -> usize {
        self.r.len() - 1
    }

    /// Precomputes the cell weights for a fixed power `p > -1`.
    ///
    /// Weights are stored relative to `r_{j+1}^{p+1}` so that large powers
    /// neither overflow nor underflow.
    pub fn power_rule(&self, p: f64) -> PowerRule {
        assert!(p > -1.0, "power weight rho^{p} is not integrable at 0");
        let cells = self.cells();
        let q = self.gamma * (p + 1.0) - 1.0;
        let mut stencil = Vec::with_capacity(cells);
        let mut carry = Vec::with_capacity(cells);
        for j in 0..cells {
            let start = j.saturating_sub(1).min(cells - 3);
            let mut w = [0.0; 4];
            if j == 0 {
                // int_0^1 u^q L_i(u) du with nodes at u = 0, 1, 2, 3
                for (i, wi) in w.iter_mut().enumerate() {
                    let c = lagrange_monomials(i);
                    let moments: f64 = (0..4).map(|k| c[k] / (q + k as f64 + 1.0)).sum();
                    *wi = self.gamma * moments;
                }
                carry.push(0.0);
            } else {
                let (a, b) = (j as f64, j as f64 + 1.0);
                // geometric sub-cells keep u^q within a factor e^{1/2}
                let pieces = (((q.abs() + 4.0) * (b / a).ln()) / 0.5).ceil().max(1.0) as usize;
                let ratio = (b / a).powf(1.0 / pieces as f64);
                let mut lo = a;
                for k in 0..pieces {
                    let hi = if k + 1 == pieces { b } else { lo * ratio };
                    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                    for (gx, gw) in GAUSS_X.iter().zip(GAUSS_W) {
                        for u in [mid - half * gx, mid + half * gx] {
                            let weight = self.gamma * gw * half / b * (u / b).powf(q);
                            for (i, wi) in w.iter_mut().enumerate() {
                                *wi += weight * lagrange(start, i, u);
                            }
                        }
                    }
                    lo = hi;
                }
                carry.push((a / b).powf(q + 1.0));
            }
            stencil.push((start, w));
        }
        let norm = self.r.iter().map(|r| r.powf(p + 1.0)).collect();
        PowerRule { p, stencil, carry, norm }
    }
}

/// Cubic Lagrange basis `i` on the integer nodes `start..start+4`, at `u`.
fn lagrange(start: usize, i: usize, u: f64) -> f64 {
    let xi = (start + i) as f64;
    let mut out = 1.0;
    for k in 0..4 {
        if k != i {
            let xk = (start + k) as f64;
            out *= (u - xk) / (xi - xk);
        }
    }
    out
}

/// Monomial coefficients of the cubic Lagrange basis `i` on nodes 0, 1, 2, 3.
fn lagrange_monomials(i: usize) -> [f64; 4] {
    let mut c = [1.0, 0.0, 0.0, 0.0];
    let mut denom = 1.0;
    for k in 0..4usize {
        if k == i {
            continue;
        }
        let xk = k as f64;
        // multiply by (u - xk)
        let mut next = [0.0; 4];
        for d in 0..3 {
            next[d + 1] += c[d];
            next[d] -= xk * c[d];
        }
        c = next;
        denom *= i as f64 - xk;
    }
    c.map(|x| x / denom)
}

#[derive(Debug, Clone)]
pub struct PowerRule {
    pub p: f64,
    /// Per cell: first node of the interpolation stencil and its weights.
    stencil: Vec<(usize, [f64; 4])>,
    /// `(r_j / r_{j+1})^{p+1}` per cell.
    carry: Vec<f64>,
    /// `r_j^{p+1}`.
    norm: Vec<f64>,
}

impl PowerRule {
    /// Writes `int_0^{r_j} rho^p F` into `out[j]` for every node.
    pub fn cumulative(&self, values: &[f64], out: &mut [f64]) {
        self.averaged(values, out);
        for (o, s) in out.iter_mut().zip(&self.norm) {
            *o *= s;
        }
    }

    /// Writes `r_j^{-(p+1)} int_0^{r_j} rho^p F` into `out[j]`; `out[0]` is
    /// the limit `F(0)/(p+1)`.
    pub fn averaged(&self, values: &[f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), self.stencil.len() + 1);
        debug_assert_eq!(out.len(), values.len());
        out[0] = values[0] / (self.p + 1.0);
        for (j, ((start, w), c)) in self.stencil.iter().zip(&self.carry).enumerate() {
            let v = &values[*start..*start + 4];
            out[j + 1] = out[j] * c + w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_weighted_function() {
        // int_0^r rho^3 cos(rho) d rho, checked against a fine Simpson sum
        let grid = GradedGrid::new(1.5, 2.0, 400);
        let rule = grid.power_rule(3.0);
        let vals: Vec<f64> = grid.r.iter().map(|r| r.cos()).collect();
        let mut out = vec![0.0; vals.len()];
        rule.cumulative(&vals, &mut out);
        let exact = simpson(|x| x.powi(3) * x.cos(), 0.0, 1.5, 20_000);
        assert!((out[400] - exact).abs() < 1e-10, "{} vs {}", out[400], exact);
    }

    #[test]
    fn relative_accuracy_near_origin() {
        // int_0^r rho^3 (1 - rho^2) = r^4/4 - r^6/6, relative error at every node
        let grid = GradedGrid::new(1.0, 2.0, 300);
        let rule = grid.power_rule(3.0);
        let vals: Vec<f64> = grid.r.iter().map(|r| 1.0 - r * r).collect();
        let mut out = vec![0.0; vals.len()];
        rule.cumulative(&vals, &mut out);
        for (j, (r, o)) in grid.r.iter().zip(&out).enumerate().skip(1) {
            let exact = r.powi(4) / 4.0 - r.powi(6) / 6.0;
            assert!((o / exact - 1.0).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn handles_fractional_power() {
        // int_0^r rho^{-2/3} (1 + rho) = 3 r^{1/3} + 3/4 r^{4/3}
        let grid = GradedGrid::new(0.8, 6.0, 1200);
        let rule = grid.power_rule(-2.0 / 3.0);
        let vals: Vec<f64> = grid.r.iter().map(|r| 1.0 + r).collect();
        let mut out = vec![0.0; vals.len()];
        rule.cumulative(&vals, &mut out);
        for j in [1usize, 5, 50, 600, 1200] {
            let r: f64 = grid.r[j];
            let exact = 3.0 * r.cbrt() + 0.75 * r.powf(4.0 / 3.0);
            assert!((out[j] - exact).abs() < 1e-12 * exact, "j={j}: {} vs {exact}", out[j]);
        }
    }

    #[test]
    fn averaged_survives_large_powers() {
        // r^{-(p+1)} int_0^r rho^p (1 + rho) = 1/(p+1) + r/(p+2), with r^{p+1} far below f64::MIN_POSITIVE
        let p = 120.0;
        let grid = GradedGrid::new(0.5, 2.0, 200);
        let rule = grid.power_rule(p);
        let vals: Vec<f64> = grid.r.iter().map(|r| 1.0 + r).collect();
        let mut out = vec![0.0; vals.len()];
        rule.averaged(&vals, &mut out);
        for (r, o) in grid.r.iter().zip(&out) {
            let exact = 1.0 / (p + 1.0) + r / (p + 2.0);
            assert!((o / exact - 1.0).abs() < 1e-12, "r={r}: {o} vs {exact}");
        }
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }
}
