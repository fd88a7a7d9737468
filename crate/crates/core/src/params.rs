//! Parameter tuple `(n, m, rho1, beta)` and every constant derived from it.
//!
//! All comparisons here are plain floating-point comparisons with strict
//! inequalities; thresholds are computed once at construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the radial profile equation
/// `(f^m/m)'' + (n-1)/r (f^m/m)' + alpha f + beta r f' = 0`
/// together with the constants of the inverted problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    n: u32,
    m: f64,
    rho1: f64,
    beta: f64,
    alpha: f64,
    alpha_tilde: f64,
    beta_tilde: f64,
    delta1: f64,
    delta0: f64,
    beta_threshold: f64,
}

/// Which existence windows and origin regimes a parameter tuple falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// `-rho1/2 < beta < m rho1 / (n-2-nm)`: the origin-value problem.
    pub origin_admissible: bool,
    /// `beta < m rho1 / (n-2-nm)`: the prescribed far-field problem.
    pub far_field_admissible: bool,
    /// `(n-2)/(n+1) <= m`: the inverted profile has an unbounded slope at 0.
    pub singular_g_origin: bool,
    /// `alpha_tilde > 0`, `beta_tilde != 0` and
    /// `alpha_tilde / beta_tilde <= (n-2)/m`.
    pub weighted_monotone_applicable: bool,
}

/// Validates `(n, m, rho1)` and builds the full parameter set.
pub fn derive_params(n: u32, m: f64, rho1: f64, beta: f64) -> Result<ProfileParams> {
    check_dimension(n, m)?;
    if !(rho1 > 0.0) || !rho1.is_finite() {
        return Err(Error::domain(format!("rho1 = {rho1} violates rho1 > 0")));
    }
    if !beta.is_finite() {
        return Err(Error::domain(format!("beta = {beta} is not finite")));
    }
    let alpha = (2.0 * beta + rho1) / (1.0 - m);
    Ok(ProfileParams::assemble(n, m, rho1, beta, alpha))
}

pub fn classify_regime(p: &ProfileParams) -> RegimeFlags {
    let n = f64::from(p.n);
    let lower = -p.rho1 / 2.0;
    let far_field_admissible = p.beta < p.beta_threshold;
    let weighted_monotone_applicable = p.alpha_tilde > 0.0
        && p.beta_tilde != 0.0
        && p.alpha_tilde / p.beta_tilde <= (n - 2.0) / p.m;
    RegimeFlags {
        origin_admissible: lower < p.beta && far_field_admissible,
        far_field_admissible,
        singular_g_origin: (n - 2.0) / (n + 1.0) <= p.m,
        weighted_monotone_applicable,
    }
}

fn check_dimension(n: u32, m: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("n = {n} violates n >= 3")));
    }
    let upper = f64::from(n - 2) / f64::from(n);
    if !(m > 0.0 && m < upper) {
        return Err(Error::domain(format!(
            "m = {m} violates 0 < m < (n-2)/n = {upper}"
        )));
    }
    Ok(())
}

impl ProfileParams {
    fn assemble(n: u32, m: f64, rho1: f64, beta: f64, alpha: f64) -> Self {
        let nf = f64::from(n);
        let gap = nf - 2.0 - nf * m;
        let ratio = gap / m;
        let delta1 = 1.0 - ratio;
        ProfileParams {
            n,
            m,
            rho1,
            beta,
            alpha,
            alpha_tilde: alpha - (nf - 2.0) / m * beta,
            beta_tilde: -beta,
            delta1,
            delta0: (1.0 - delta1) / 2.0,
            beta_threshold: m * rho1 / gap,
        }
    }

    /// Builds parameters with an arbitrary `(alpha, beta)` pair, bypassing the
    /// `alpha = (2 beta + rho1)/(1 - m)` relation and the `rho1 > 0` check.
    /// `rho1` is set to `alpha (1 - m) - 2 beta` so the relation still holds
    /// formally. Meant for degenerate diagnostic probes only.
    pub fn with_exponents(n: u32, m: f64, alpha: f64, beta: f64) -> Result<Self> {
        check_dimension(n, m)?;
        let rho1 = alpha * (1.0 - m) - 2.0 * beta;
        Ok(Self::assemble(n, m, rho1, beta, alpha))
    }

    /// Same `(n, m, rho1)` with a different `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        derive_params(self.n, self.m, self.rho1, beta)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn rho1(&self) -> f64 {
        self.rho1
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }
    pub fn beta_tilde(&self) -> f64 {
        self.beta_tilde
    }
    pub fn delta1(&self) -> f64 {
        self.delta1
    }
    pub fn delta0(&self) -> f64 {
        self.delta0
    }
    /// `m rho1 / (n-2-nm)`.
    pub fn beta_threshold(&self) -> f64 {
        self.beta_threshold
    }

    /// `(n-2-nm)/m`, the extra power carried by the inverted equation.
    pub fn inversion_gap(&self) -> f64 {
        (self.dim() - 2.0 - self.dim() * self.m) / self.m
    }

    /// `(n-2)/m`, the fast far-field decay exponent.
    pub fn fast_exponent(&self) -> f64 {
        (self.dim() - 2.0) / self.m
    }

    /// `2/(1-m)`, the slow far-field decay exponent.
    pub fn slow_exponent(&self) -> f64 {
        2.0 / (1.0 - self.m)
    }

    pub fn regime(&self) -> RegimeFlags {
        classify_regime(self)
    }

    /// Errors unless `-rho1/2 < beta < m rho1/(n-2-nm)`.
    pub fn require_origin_window(&self) -> Result<()> {
        let lower = -self.rho1 / 2.0;
        if lower < self.beta && self.beta < self.beta_threshold {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "beta = {} violates -rho1/2 < beta < m*rho1/(n-2-n*m), i.e. {} < beta < {}",
                self.beta, lower, self.beta_threshold
            )))
        }
    }

    /// Errors unless `beta < m rho1/(n-2-nm)`, equivalently `alpha_tilde > 0`.
    pub fn require_far_field_window(&self) -> Result<()> {
        if self.beta < self.beta_threshold {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "beta = {} violates beta < m*rho1/(n-2-n*m) = {} (needed for alpha_tilde > 0)",
                self.beta, self.beta_threshold
            )))
        }
    }
}
