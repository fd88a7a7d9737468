//! Checks on solved profiles: equation residuals, limits, sign properties,
//! decay classification, the fast-decay exponent search and the space-time
//! solution.

mod decay;
mod inequalities;
mod limits;
mod residual;
mod selfsimilar;

use serde::{Deserialize, Serialize};

pub use decay::{
    classify_decay, classify_origin, find_anomalous_beta, find_anomalous_beta_with, BetaProbe, BetaSearch,
    BetaSearchOptions, DecayClass, DecayKind, Side,
};
pub use inequalities::{classify_shape, verify_inequalities, InequalityReport, Shape, Verdict};
pub use limits::{asymptotic_limits, extrapolate, AsymptoticLimits, LimitEstimate, FAR_RANGE, NEAR_RANGE};
pub use residual::{fd_weights, ode_residual, ode_residual_at, sample_defects};
pub use selfsimilar::{pde_residual_v, selfsimilar_eval, ClosedForm, RadialFunction};

use crate::integrate::TerminalEvent;
use crate::inversion::{Profile, ProfileKind};
use crate::params::{ProfileParams, RegimeFlags};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Largest relative defect of the profile equation.
    pub ode: f64,
    /// Radius where `ode` is attained.
    pub ode_at: f64,
    /// Relative jump at the hand-off from the local solution.
    pub seam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub params: ProfileParams,
    pub regime: RegimeFlags,
    pub kind: ProfileKind,
    pub boundary: f64,
    pub terminal_event: TerminalEvent,
    pub terminal_radius: f64,
    pub residual: ResidualReport,
    /// `None` when the profile does not reach far enough in either
    /// direction.
    pub limits: Option<AsymptoticLimits>,
    pub inequalities: InequalityReport,
    pub decay_class: DecayClass,
    pub shape: Shape,
    pub tol: f64,
}

impl SolveReport {
    /// True when continuation reached `r_max`, the residual is below
    /// `residual_limit` and no applicable inequality fails.
    pub fn passes(&self, residual_limit: f64) -> bool {
        self.terminal_event == TerminalEvent::ReachedRmax && self.checks_pass(residual_limit)
    }

    /// The residual and inequality checks alone, wherever the profile ends.
    pub fn checks_pass(&self, residual_limit: f64) -> bool {
        self.residual.ode <= residual_limit && !self.inequalities.any_fails()
    }
}

/// Runs every check on a profile, complete or partial.
pub fn analyze(profile: &Profile) -> SolveReport {
    let (ode, ode_at) = ode_residual_at(profile);
    SolveReport {
        params: profile.params,
        regime: profile.params.regime(),
        kind: profile.kind,
        boundary: profile.boundary,
        terminal_event: profile.terminal_event,
        terminal_radius: match (profile.kind, &profile.inverted) {
            (ProfileKind::FarField, Some(g)) => *g.radii.last().unwrap(),
            _ => *profile.radii.last().unwrap(),
        },
        residual: ResidualReport { ode, ode_at, seam: profile.seam_mismatch },
        limits: asymptotic_limits(profile).ok(),
        inequalities: verify_inequalities(profile),
        decay_class: classify_decay(profile),
        shape: classify_shape(profile),
        tol: profile.tol,
    }
}
