//! The space-time solution `V(x, t) = (T-t)^alpha f((T-t)^beta |x|)` of
//! `u_t = Laplace(u^m/m)` built from a profile.

use crate::error::{Error, Result};
use crate::inversion::Profile;
use crate::params::{derive_params, ProfileParams};

/// A radial profile that can be evaluated anywhere in its range.
pub trait RadialFunction: Sync {
    fn params(&self) -> &ProfileParams;
    /// Closed interval on which `value` is defined.
    fn range(&self) -> (f64, f64);
    fn value(&self, r: f64) -> Option<f64>;
}

impl RadialFunction for Profile {
    fn params(&self) -> &ProfileParams {
        &self.params
    }

    fn range(&self) -> (f64, f64) {
        Profile::range(self)
    }

    fn value(&self, r: f64) -> Option<f64> {
        self.eval(r).map(|(f, _)| f)
    }
}

/// `f(r) = (a + r^2/(4na))^{-(n+2)/2}` with `m = (n-2)/(n+2)`, `beta = 0`,
/// `rho1 = 1`.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm {
    params: ProfileParams,
    a: f64,
}

impl ClosedForm {
    pub fn new(n: u32, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::domain(format!("a = {a} violates a > 0")));
        }
        let nf = f64::from(n);
        let params = derive_params(n, (nf - 2.0) / (nf + 2.0), 1.0, 0.0)?;
        Ok(ClosedForm { params, a })
    }

    /// Same function, evaluated against different exponents. Used to probe
    /// degenerate parameter choices.
    pub fn with_params(self, params: ProfileParams) -> Self {
        ClosedForm { params, ..self }
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        let n = self.params.dim();
        let q = self.a + r * r / (4.0 * n * self.a);
        let e = -(n + 2.0) / 2.0;
        let f = q.powf(e);
        (f, e * q.powf(e - 1.0) * r / (2.0 * n * self.a))
    }

    /// `lim r^{(n-2)/m} f(r) = (4na)^{(n+2)/2}`.
    pub fn far_coefficient(&self) -> f64 {
        let n = self.params.dim();
        (4.0 * n * self.a).powf((n + 2.0) / 2.0)
    }
}

impl RadialFunction for ClosedForm {
    fn params(&self) -> &ProfileParams {
        &self.params
    }

    fn range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn value(&self, r: f64) -> Option<f64> {
        (r >= 0.0).then(|| self.eval(r).0)
    }
}

/// `V(x, t) = (T-t)^alpha f((T-t)^beta |x|)`.
pub fn selfsimilar_eval<F: RadialFunction + ?Sized>(f: &F, big_t: f64, x_norm: f64, t: f64) -> Result<f64> {
    if !(t < big_t) {
        return Err(Error::Range(format!("t = {t} violates t < T = {big_t}")));
    }
    let p = f.params();
    let tau = big_t - t;
    let y = tau.powf(p.beta()) * x_norm;
    let (lo, hi) = f.range();
    match f.value(y) {
        Some(v) => Ok(tau.powf(p.alpha()) * v),
        None => Err(Error::Range(format!(
            "rescaled radius {y:e} outside the profile range [{lo:e}, {hi:e}]"
        ))),
    }
}

/// Largest relative residual of `V_t = Laplace(V^m/m)` over the grid, with
/// centred differences of step `h` in both `t` and `|x|`.
///
/// At each point the residual is `|V_t - L|/(|V_t| + |L|)` where `L` is the
/// radial Laplacian of `V^m/m`.
pub fn pde_residual_v<F: RadialFunction + ?Sized>(
    f: &F,
    big_t: f64,
    space_grid: &[f64],
    time_grid: &[f64],
    h: f64,
) -> Result<f64> {
    let p = f.params();
    let (n, m) = (p.dim(), p.m());
    let w = |x: f64, t: f64| selfsimilar_eval(f, big_t, x, t).map(|v| v.powf(m) / m);
    let mut worst = 0.0f64;
    for &t in time_grid {
        for &x in space_grid {
            if !(x > h) {
                return Err(Error::Range(format!("|x| = {x} must exceed the step h = {h}")));
            }
            let vt = (selfsimilar_eval(f, big_t, x, t + h)? - selfsimilar_eval(f, big_t, x, t - h)?) / (2.0 * h);
            let (wm, w0, wp) = (w(x - h, t)?, w(x, t)?, w(x + h, t)?);
            let lap = (wp - 2.0 * w0 + wm) / (h * h) + (n - 1.0) / x * (wp - wm) / (2.0 * h);
            let scale = vt.abs() + lap.abs();
            if scale > 0.0 {
                worst = worst.max((vt - lap).abs() / scale);
            }
        }
    }
    Ok(worst)
}
