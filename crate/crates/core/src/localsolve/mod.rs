//! Local solutions on `(0, eps]` by Picard iteration of the integral form of
//! the radial equations.
//!
//! For the origin-value problem the iterated pair is `(f, h = f')`:
//!
//! ```text
//! f(r) = eta0 + int_0^r h
//! h(r) = -f(r)^{1-m} r^{1-n} int_0^r rho^{n-1} (alpha f + beta rho h)
//! ```
//!
//! and the iterate must stay in the ball `|f - eta0|, |h| <= eta0/2`.
//!
//! For the inverted problem only `g` is iterated. With `k = (n-2-nm)/m`,
//! `g' = r^{k-1} q(r)` where
//!
//! ```text
//! q(r) = g^{1-m} ( -beta_tilde g + c r^{-(n+k-2)} int_0^r rho^{n+k-3} g ),
//! c    = beta_tilde (n+k-2) - alpha_tilde,
//! ```
//!
//! is bounded at the origin, and `g(r) = eta + int_0^r rho^{k-1} q`. The same
//! kernel covers both the regular (`k > 1`) and the singular (`k <= 1`)
//! origin regimes.

mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProfileParams;

pub use quadrature::{GradedGrid, PowerRule};

const MAX_HALVINGS: u32 = 40;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    /// `f(0) = eta0`, `f'(0) = 0`.
    FOrigin,
    /// `g(0) = eta`, `g'(0) = 0`.
    GRegular,
    /// `g(0) = eta`, `r^{delta1} g'(r)` tends to a negative constant.
    GSingular,
}

#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub eps: f64,
    /// Strictly increasing radii in `(0, eps]`.
    pub grid: Vec<f64>,
    pub value: Vec<f64>,
    pub deriv: Vec<f64>,
    pub boundary_value: f64,
    pub problem_kind: ProblemKind,
    pub iterations: usize,
    pub contraction_estimate: f64,
    pub residual: f64,
    /// Grading exponent of `grid`.
    pub grading: f64,
    /// For the inverted problem: `r^{1-k} g'` at the grid nodes, bounded up
    /// to the origin. Empty for the origin-value problem.
    pub scaled_deriv: Vec<f64>,
    /// Limit of `scaled_deriv` at `r = 0`.
    pub scaled_deriv_origin: f64,
}

/// Tuning for the Picard stage. `cells = None` picks a count from `tol`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalOptions {
    pub cells: Option<usize>,
    pub eps: Option<f64>,
}

fn default_cells(gamma: f64, tol: f64) -> usize {
    let base = (3.0 * tol.powf(-0.25)).max(80.0);
    ((gamma * base).ceil() as usize).min(40_000)
}

fn check_inputs(boundary: f64, tol: f64, name: &str) -> Result<()> {
    if !(boundary > 0.0) || !boundary.is_finite() {
        return Err(Error::domain(format!("{name} = {boundary} violates {name} > 0")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tol = {tol} violates tol > 0")));
    }
    Ok(())
}

enum Attempt<T> {
    Converged(T),
    Failed,
}

fn halving_search<T>(
    eps0: f64,
    mut attempt: impl FnMut(f64) -> Attempt<T>,
) -> Result<T> {
    let mut eps = eps0;
    for _ in 0..=MAX_HALVINGS {
        if let Attempt::Converged(sol) = attempt(eps) {
            return Ok(sol);
        }
        eps *= 0.5;
    }
    Err(Error::NoContraction {
        halvings: MAX_HALVINGS,
        last_eps: eps * 2.0,
    })
}

/// Tracks successive-difference ratios of a Picard run.
struct Contraction {
    prev: Option<f64>,
    ratio: f64,
}

impl Contraction {
    fn new() -> Self {
        Contraction { prev: None, ratio: 0.0 }
    }

    /// Returns false once the differences stop shrinking.
    fn record(&mut self, diff: f64) -> bool {
        if let Some(prev) = self.prev {
            if prev > 0.0 {
                self.ratio = diff / prev;
                if self.ratio >= 1.0 && diff > 0.0 {
                    return false;
                }
            }
        }
        self.prev = Some(diff);
        true
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Local solution of the origin-value problem `f(0) = eta0, f'(0) = 0`.
pub fn picard_f_origin(p: &ProfileParams, eta0: f64, tol: f64) -> Result<LocalSolution> {
    picard_f_origin_with(p, eta0, tol, LocalOptions::default())
}

pub fn picard_f_origin_with(
    p: &ProfileParams,
    eta0: f64,
    tol: f64,
    opts: LocalOptions,
) -> Result<LocalSolution> {
    check_inputs(eta0, tol, "eta0")?;
    p.require_far_field_window()?;
    let gamma = 2.0;
    let cells = opts.cells.unwrap_or_else(|| default_cells(gamma, tol));
    let eps0 = opts.eps.unwrap_or_else(|| 1f64.min(eta0.powf((p.m() - 1.0) / 2.0)));
    halving_search(eps0, |eps| f_attempt(p, eta0, tol, eps, gamma, cells))
}

fn f_attempt(
    p: &ProfileParams,
    eta0: f64,
    tol: f64,
    eps: f64,
    gamma: f64,
    cells: usize,
) -> Attempt<LocalSolution> {
    let grid = GradedGrid::new(eps, gamma, cells);
    let plain = grid.power_rule(0.0);
    let weighted = grid.power_rule(p.dim() - 1.0);
    let nodes = grid.r.len();
    let (alpha, beta, m) = (p.alpha(), p.beta(), p.m());
    let area: Vec<f64> = grid.r.iter().map(|r| r.powf(p.dim() - 1.0)).collect();

    let mut f = vec![eta0; nodes];
    let mut h = vec![0.0; nodes];
    let mut f_next = vec![0.0; nodes];
    let mut h_next = vec![0.0; nodes];
    let mut source = vec![0.0; nodes];
    let mut acc = vec![0.0; nodes];
    let mut contraction = Contraction::new();

    for iteration in 1..=MAX_ITERATIONS {
        plain.cumulative(&h, &mut acc);
        for (fn_, a) in f_next.iter_mut().zip(&acc) {
            *fn_ = eta0 + a;
        }
        for j in 0..nodes {
            source[j] = alpha * f[j] + beta * grid.r[j] * h[j];
        }
        weighted.cumulative(&source, &mut acc);
        h_next[0] = 0.0;
        for j in 1..nodes {
            h_next[j] = -f[j].powf(1.0 - m) * acc[j] / area[j];
        }

        let in_ball = f_next
            .iter()
            .zip(&h_next)
            .all(|(fv, hv)| (fv - eta0).abs() <= eta0 / 2.0 && hv.abs() <= eta0 / 2.0);
        if !in_ball || f_next.iter().chain(&h_next).any(|v| !v.is_finite()) {
            return Attempt::Failed;
        }
        let diff = sup_diff(&f_next, &f).max(sup_diff(&h_next, &h)) / eta0;
        std::mem::swap(&mut f, &mut f_next);
        std::mem::swap(&mut h, &mut h_next);
        if !contraction.record(diff) {
            return Attempt::Failed;
        }
        if diff < tol / 10.0 {
            return Attempt::Converged(LocalSolution {
                eps,
                grid: grid.r[1..].to_vec(),
                value: f[1..].to_vec(),
                deriv: h[1..].to_vec(),
                boundary_value: eta0,
                problem_kind: ProblemKind::FOrigin,
                iterations: iteration,
                contraction_estimate: contraction.ratio,
                residual: diff,
                grading: gamma,
                scaled_deriv: Vec::new(),
                scaled_deriv_origin: 0.0,
            });
        }
    }
    Attempt::Failed
}

/// Local solution of the inverted problem `g(0) = eta`.
pub fn picard_g_origin(p: &ProfileParams, eta: f64, tol: f64) -> Result<LocalSolution> {
    picard_g_origin_with(p, eta, tol, LocalOptions::default())
}

pub fn picard_g_origin_with(
    p: &ProfileParams,
    eta: f64,
    tol: f64,
    opts: LocalOptions,
) -> Result<LocalSolution> {
    check_inputs(eta, tol, "eta")?;
    if !(p.alpha_tilde() > 0.0) {
        return Err(Error::domain(format!(
            "alpha_tilde = alpha - (n-2)/m * beta = {} violates alpha_tilde > 0",
            p.alpha_tilde()
        )));
    }
    let k = p.inversion_gap();
    let gamma = 2f64.max(2.0 / k);
    let cells = opts.cells.unwrap_or_else(|| default_cells(gamma, tol));
    // g(r) = lambda G(lambda^{(1-m)/k} r) maps solutions to solutions
    let eps0 = opts.eps.unwrap_or_else(|| 1f64.min(eta.powf((p.m() - 1.0) / k)));
    halving_search(eps0, |eps| g_attempt(p, eta, tol, eps, gamma, cells))
}

/// `lim_{r -> 0} r^{1-k} g'(r) = -alpha_tilde eta^{2-m} / (n+k-2)`.
pub fn singular_slope_limit(p: &ProfileParams, eta: f64) -> f64 {
    let k = p.inversion_gap();
    -p.alpha_tilde() * eta.powf(2.0 - p.m()) / (p.dim() + k - 2.0)
}

fn g_attempt(
    p: &ProfileParams,
    eta: f64,
    tol: f64,
    eps: f64,
    gamma: f64,
    cells: usize,
) -> Attempt<LocalSolution> {
    let grid = GradedGrid::new(eps, gamma, cells);
    let k = p.inversion_gap();
    let n = p.dim();
    let m = p.m();
    let top = n + k - 2.0;
    let weighted = grid.power_rule(top - 1.0);
    let singular = grid.power_rule(k - 1.0);
    let (at, bt) = (p.alpha_tilde(), p.beta_tilde());
    let c = bt * top - at;
    let nodes = grid.r.len();
    let q0 = singular_slope_limit(p, eta);

    let mut g = vec![eta; nodes];
    let mut g_next = vec![0.0; nodes];
    let mut q = vec![0.0; nodes];
    let mut acc = vec![0.0; nodes];
    let mut contraction = Contraction::new();

    for iteration in 1..=MAX_ITERATIONS {
        weighted.averaged(&g, &mut acc);
        q[0] = q0;
        for j in 1..nodes {
            q[j] = g[j].powf(1.0 - m) * (-bt * g[j] + c * acc[j]);
        }
        singular.cumulative(&q, &mut acc);
        for (gn, a) in g_next.iter_mut().zip(&acc) {
            *gn = eta + a;
        }
        let in_ball = g_next.iter().all(|v| (v - eta).abs() <= eta / 2.0);
        if !in_ball || g_next.iter().any(|v| !v.is_finite()) {
            return Attempt::Failed;
        }
        let diff = sup_diff(&g_next, &g) / eta;
        std::mem::swap(&mut g, &mut g_next);
        if !contraction.record(diff) {
            return Attempt::Failed;
        }
        if diff < tol / 10.0 {
            // q consistent with the accepted g
            weighted.averaged(&g, &mut acc);
            for j in 1..nodes {
                q[j] = g[j].powf(1.0 - m) * (-bt * g[j] + c * acc[j]);
            }
            let deriv = (1..nodes).map(|j| grid.r[j].powf(k - 1.0) * q[j]).collect();
            let kind = if p.regime().singular_g_origin {
                ProblemKind::GSingular
            } else {
                ProblemKind::GRegular
            };
            return Attempt::Converged(LocalSolution {
                eps,
                grid: grid.r[1..].to_vec(),
                value: g[1..].to_vec(),
                deriv,
                boundary_value: eta,
                problem_kind: kind,
                iterations: iteration,
                contraction_estimate: contraction.ratio,
                residual: diff,
                grading: gamma,
                scaled_deriv: q[1..].to_vec(),
                scaled_deriv_origin: q0,
            });
        }
    }
    Attempt::Failed
}

impl LocalSolution {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn bubble(r: f64) -> f64 {
        (1.0 + r * r / 16.0).powi(-3)
    }

    fn bubble_g(r: f64) -> f64 {
        (r * r + 1.0 / 16.0).powi(-3)
    }

    #[test]
    fn f_origin_reproduces_explicit_solution() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let loc = picard_f_origin(&p, 1.0, 1e-10).unwrap();
        assert!(loc.contraction_estimate < 1.0);
        assert!(loc.residual <= 1e-10);
        for (r, v) in loc.grid.iter().zip(&loc.value) {
            assert!((v - bubble(*r)).abs() < 1e-8, "r={r}");
        }
        // f'(r)/r -> -(alpha/n) eta0^{2-m} = -3/8
        let ratio = loc.deriv[0] / loc.grid[0];
        assert!((ratio + 0.375).abs() < 1e-6, "{ratio}");
        assert!(loc.deriv.iter().all(|d| *d < 0.0));
        assert!(loc.value.iter().all(|v| (v - 1.0).abs() <= 0.5));
    }

    #[test]
    fn g_origin_reproduces_inverted_solution() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let loc = picard_g_origin(&p, 4096.0, 1e-11).unwrap();
        assert_eq!(loc.problem_kind, ProblemKind::GRegular);
        for (r, v) in loc.grid.iter().zip(&loc.value) {
            let exact = bubble_g(*r);
            assert!((v - exact).abs() < 1e-8 * exact, "r={r}: {v} vs {exact}");
        }
        assert!(loc.deriv.iter().all(|d| *d < 0.0));
    }

    #[test]
    fn singular_slope_emerges() {
        // n = 3, m = 0.3: r^{2/3} g' -> -m alpha_tilde eta^{2-m} / (n-2-2m) = -15/14
        let p = derive_params(3, 0.3, 1.0, 0.0).unwrap();
        let loc = picard_g_origin(&p, 1.0, 1e-10).unwrap();
        assert_eq!(loc.problem_kind, ProblemKind::GSingular);
        let limit = singular_slope_limit(&p, 1.0);
        assert!((limit + 15.0 / 14.0).abs() < 1e-14);
        let d1 = p.delta1();
        let near = loc.grid[0].powf(d1) * loc.deriv[0];
        assert!((near - limit).abs() < 1e-6 * limit.abs(), "{near} vs {limit}");
        assert!(loc.deriv.iter().all(|d| *d < 0.0));
    }

    #[test]
    fn boundary_value_is_exact_at_origin() {
        let p = derive_params(5, 0.45, 1.0, 0.2).unwrap();
        let loc = picard_g_origin(&p, 2.5, 1e-9).unwrap();
        assert!((loc.value[0] - 2.5).abs() < 1e-9);
        let loc = picard_f_origin(&p, 0.7, 1e-9).unwrap();
        assert!((loc.value[0] - 0.7).abs() < 1e-12);
        // f'(r) ~ -(alpha/n) eta0^{2-m} r at the first node
        let limit = -p.alpha() / 5.0 * 0.7f64.powf(2.0 - p.m());
        assert!((loc.deriv[0] / loc.grid[0] - limit).abs() < 1e-6 * limit.abs());
    }

    #[test]
    fn grid_refinement_is_self_consistent() {
        for (n, m, beta) in [(4, 1.0 / 3.0, 0.2), (3, 0.3, -0.1), (5, 0.3, 0.1)] {
            let p = derive_params(n, m, 1.0, beta).unwrap();
            let tol = 1e-9;
            let base = default_cells(2.0, tol);
            let coarse = picard_f_origin_with(&p, 1.0, tol, LocalOptions { cells: Some(base), eps: None }).unwrap();
            let fine = picard_f_origin_with(
                &p,
                1.0,
                tol,
                LocalOptions { cells: Some(2 * base), eps: Some(coarse.eps) },
            )
            .unwrap();
            for (j, v) in coarse.value.iter().enumerate() {
                assert!((v - fine.value[2 * j + 1]).abs() <= 10.0 * tol);
            }

            let coarse = picard_g_origin(&p, 1.0, tol).unwrap();
            let fine = picard_g_origin_with(
                &p,
                1.0,
                tol,
                LocalOptions { cells: Some(2 * coarse.len()), eps: Some(coarse.eps) },
            )
            .unwrap();
            for (j, v) in coarse.value.iter().enumerate() {
                assert!((v - fine.value[2 * j + 1]).abs() <= 10.0 * tol, "n={n} m={m} j={j}");
            }
        }
    }

    #[test]
    fn regimes_agree_near_the_edge() {
        // m slightly below (n-2)/(n+1) = 0.4 (regular) and exactly at it (singular)
        let below = derive_params(4, 0.4 - 1e-9, 1.0, 0.1).unwrap();
        let at = derive_params(4, 0.4, 1.0, 0.1).unwrap();
        let a = picard_g_origin_with(&below, 1.0, 1e-10, LocalOptions { cells: None, eps: Some(0.25) }).unwrap();
        let b = picard_g_origin_with(&at, 1.0, 1e-10, LocalOptions { cells: None, eps: Some(0.25) }).unwrap();
        assert_eq!(a.problem_kind, ProblemKind::GRegular);
        assert_eq!(b.problem_kind, ProblemKind::GSingular);
        let last = a.value.len() - 1;
        assert!((a.value[last] - b.value[b.value.len() - 1]).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = derive_params(4, 1.0 / 3.0, 1.0, 0.0).unwrap();
        assert!(matches!(picard_f_origin(&p, 0.0, 1e-9), Err(Error::Domain(_))));
        let q = p.with_beta(0.6).unwrap();
        assert!(matches!(picard_g_origin(&q, 1.0, 1e-9), Err(Error::Domain(_))));
        assert!(matches!(picard_f_origin(&q, 1.0, 1e-9), Err(Error::Domain(_))));
    }
}
