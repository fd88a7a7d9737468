//! The two radial equations in divergence form.
//!
//! Both the profile `f` and its inversion `g(r) = r^{-(n-2)/m} f(1/r)` solve
//!
//! ```text
//! P  = r^{n-1} v^{m-1} v'          (= r^{n-1} (v^m/m)')
//! P' = -r^w (a v + b r v')
//! ```
//!
//! with `(w, a, b) = (n-1, alpha, beta)` for `f` and
//! `(w, a, b) = (n + (n-2-nm)/m - 3, alpha_tilde, beta_tilde)` for `g`.

use serde::{Deserialize, Serialize};

use crate::params::ProfileParams;

/// Which unknown a set of samples describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    F,
    G,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::F => "f",
            Variable::G => "g",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEquation {
    pub variable: Variable,
    n: f64,
    m: f64,
    a: f64,
    b: f64,
    weight_exp: f64,
}

impl RadialEquation {
    pub fn for_f(p: &ProfileParams) -> Self {
        RadialEquation {
            variable: Variable::F,
            n: p.dim(),
            m: p.m(),
            a: p.alpha(),
            b: p.beta(),
            weight_exp: p.dim() - 1.0,
        }
    }

    pub fn for_g(p: &ProfileParams) -> Self {
        RadialEquation {
            variable: Variable::G,
            n: p.dim(),
            m: p.m(),
            a: p.alpha_tilde(),
            b: p.beta_tilde(),
            weight_exp: p.dim() + p.inversion_gap() - 3.0,
        }
    }

    pub fn new(variable: Variable, p: &ProfileParams) -> Self {
        match variable {
            Variable::F => Self::for_f(p),
            Variable::G => Self::for_g(p),
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn dim(&self) -> f64 {
        self.n
    }
    /// Coefficient of `v` in the source term.
    pub fn a(&self) -> f64 {
        self.a
    }
    /// Coefficient of `r v'` in the source term.
    pub fn b(&self) -> f64 {
        self.b
    }
    /// Exponent `w` of the source weight `r^w`.
    pub fn weight_exp(&self) -> f64 {
        self.weight_exp
    }

    #[inline]
    fn area(&self, r: f64) -> f64 {
        r.powf(self.n - 1.0)
    }

    #[inline]
    pub fn deriv_from_flux(&self, r: f64, v: f64, flux: f64) -> f64 {
        v.powf(1.0 - self.m) * flux / self.area(r)
    }

    #[inline]
    pub fn flux_from_deriv(&self, r: f64, v: f64, dv: f64) -> f64 {
        self.area(r) * v.powf(self.m - 1.0) * dv
    }

    /// `-r^w (a v + b r v')`.
    #[inline]
    pub fn flux_rate(&self, r: f64, v: f64, dv: f64) -> f64 {
        -self.source(r, v, dv)
    }

    /// `r^w (a v + b r v')`.
    #[inline]
    pub fn source(&self, r: f64, v: f64, dv: f64) -> f64 {
        r.powf(self.weight_exp) * (self.a * v + self.b * r * dv)
    }

    /// `r^w (|a v| + |b r v'|)`, used to normalise defects.
    #[inline]
    pub fn source_scale(&self, r: f64, v: f64, dv: f64) -> f64 {
        r.powf(self.weight_exp) * ((self.a * v).abs() + (self.b * r * dv).abs())
    }

    /// Right-hand side of the first-order system in `(v, P)`.
    #[inline]
    pub fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        let dv = self.deriv_from_flux(r, y[0], y[1]);
        [dv, self.flux_rate(r, y[0], dv)]
    }

    /// `v''` implied by the equation at a point where `v, v'` are known.
    pub fn second_derivative(&self, r: f64, v: f64, dv: f64) -> f64 {
        let dflux = self.flux_rate(r, v, dv);
        (1.0 - self.m) * dv * dv / v + v.powf(1.0 - self.m) * dflux / self.area(r)
            - (self.n - 1.0) * dv / r
    }

    /// Natural magnitude of the flux at `(r, v)`: `r^{n-2} v^m`.
    #[inline]
    pub fn flux_scale(&self, r: f64, v: f64) -> f64 {
        r.powf(self.n - 2.0) * v.abs().powf(self.m)
    }
}
