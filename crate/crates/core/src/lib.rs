//! Radially symmetric self-similar profiles of the fast diffusion equation
//! `u_t = Laplace(u^m/m)`, `0 < m < (n-2)/n`.
//!
//! A profile `f` solves
//!
//! ```text
//! (f^m/m)'' + (n-1)/r (f^m/m)' + alpha f + beta r f' = 0,   alpha = (2 beta + rho1)/(1 - m),
//! ```
//!
//! either with `f(0) = eta0` ([`solve_origin`]) or with
//! `r^{(n-2)/m} f(r) -> eta` as `r -> infinity` ([`solve_farfield`]). The
//! second problem is solved through the inversion
//! `g(r) = r^{-(n-2)/m} f(1/r)`, which turns it into an origin problem for
//! `g`.
//!
//! Both solves run a Picard iteration near the origin ([`localsolve`]) and
//! continue outward with an adaptive Runge–Kutta method ([`integrate`]).
//! [`analysis`] checks solved profiles.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod equation;
pub mod error;
pub mod integrate;
pub mod inversion;
pub mod localsolve;
pub mod params;
pub mod solve;
pub mod sweep;

pub use analysis::{
    analyze, asymptotic_limits, classify_decay, find_anomalous_beta, ode_residual, pde_residual_v, selfsimilar_eval,
    verify_inequalities, ClosedForm, DecayClass, DecayKind, SolveReport,
};
pub use equation::{RadialEquation, Variable};
pub use error::{Error, Result};
pub use integrate::{advance_f, advance_g, continue_profile, OdeState, TerminalEvent, Trajectory};
pub use inversion::{boundary_dictionary, invert_pointwise, roundtrip, Profile, ProfileKind, RadialSamples};
pub use localsolve::{picard_f_origin, picard_g_origin, LocalSolution, ProblemKind};
pub use params::{classify_regime, derive_params, ProfileParams, RegimeFlags};
pub use solve::{solve_farfield, solve_origin};
