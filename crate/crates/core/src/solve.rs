//! Local solve followed by continuation, for both boundary problems.

use crate::error::{Error, Result};
use crate::integrate::continue_profile;
use crate::inversion::Profile;
use crate::localsolve::{picard_f_origin, picard_g_origin};
use crate::params::ProfileParams;

/// Profile with `f(0) = eta0`, `f'(0) = 0`, continued to `r_max`.
pub fn solve_origin(p: &ProfileParams, eta0: f64, r_max: f64, tol: f64) -> Result<Profile> {
    p.require_origin_window()?;
    let local = picard_f_origin(p, eta0, tol)?;
    continue_profile(&local, p, r_max, tol)
}

/// The inverted continuation runs this much tighter than requested: `f'`
/// at small `r` is `-x^{a+1}(a g + x g')` at `x = 1/r`, a difference that
/// cancels like `r^2`, so relative errors in `g` grow by `1/r^2` in `f'`.
pub const FAR_FIELD_TOL_FACTOR: f64 = 1e-2;

/// Profile with `r^{(n-2)/m} f(r) -> eta`, obtained from the inverted
/// problem `g(0) = eta` continued to `g_r_max`. The returned `f` covers
/// `[1/g_r_max, ...)`.
pub fn solve_farfield(p: &ProfileParams, eta: f64, g_r_max: f64, tol: f64) -> Result<Profile> {
    p.require_far_field_window()?;
    let local = picard_g_origin(p, eta, tol)?;
    let stamp = |mut pr: Profile| {
        pr.tol = tol;
        pr
    };
    match continue_profile(&local, p, g_r_max, tol * FAR_FIELD_TOL_FACTOR) {
        Ok(pr) => Ok(stamp(pr)),
        Err(Error::ContinuationFailed { event, radius, partial }) => {
            Err(Error::ContinuationFailed { event, radius, partial: Box::new(stamp(*partial)) })
        }
        Err(e) => Err(e),
    }
}

/// Turns a failed continuation into its partial profile.
pub fn partial(result: Result<Profile>) -> Result<Profile> {
    match result {
        Err(Error::ContinuationFailed { partial, .. }) => Ok(*partial),
        other => other,
    }
}

pub fn solve_origin_partial(p: &ProfileParams, eta0: f64, r_max: f64, tol: f64) -> Result<Profile> {
    partial(solve_origin(p, eta0, r_max, tol))
}

pub fn solve_farfield_partial(p: &ProfileParams, eta: f64, g_r_max: f64, tol: f64) -> Result<Profile> {
    partial(solve_farfield(p, eta, g_r_max, tol))
}
