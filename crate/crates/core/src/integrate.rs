//! Outward continuation of local solutions with an adaptive Dormand–Prince
//! 5(4) pair on the state `(v, P)`, `P = r^{n-1} v^{m-1} v'`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equation::{RadialEquation, Variable};
use crate::error::{Error, Result};
use crate::inversion::{invert_pointwise, Profile, ProfileKind, RadialSamples};
use crate::localsolve::{LocalSolution, ProblemKind};
use crate::params::ProfileParams;

/// Values at or below this are treated as extinction of the profile.
pub const VALUE_FLOOR: f64 = 1e-30;
/// Smallest step allowed, relative to `r`.
pub const MIN_REL_STEP: f64 = 1e-14;
/// Largest step allowed, relative to `r`.
pub const MAX_REL_STEP: f64 = 0.05;
/// Tolerance of event localisation in `r`.
const EVENT_TOL: f64 = 1e-12;
/// Local nodes whose spacing ratio exceeds this are left out of a stitched
/// profile, so that finite-difference stencils stay well conditioned.
const MAX_NODE_RATIO: f64 = 1.05;
/// Inverted-problem nodes with `(eta - g)/eta` below this are left out of a
/// stitched profile: the far-field sign checks there are below rounding.
const MIN_DEFICIT: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub r: f64,
    pub v: f64,
    pub flux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TerminalEvent {
    ReachedRmax,
    /// `v` fell to [`VALUE_FLOOR`].
    ValueFloor,
    /// `|v'|` exceeded `1/VALUE_FLOOR`.
    DerivBlowup,
    /// `v` exceeded `1/VALUE_FLOOR`.
    ValueBlowup,
    StepUnderflow,
}

impl fmt::Display for TerminalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TerminalEvent::ReachedRmax => "ReachedRmax",
            TerminalEvent::ValueFloor => "ValueFloor",
            TerminalEvent::DerivBlowup => "DerivBlowup",
            TerminalEvent::ValueBlowup => "ValueBlowup",
            TerminalEvent::StepUnderflow => "StepUnderflow",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub variable: Variable,
    pub states: Vec<OdeState>,
    /// `v'` at each state.
    pub derivs: Vec<f64>,
    /// Normalised error estimate of the step that produced each state
    /// (0 for the initial state and located event states).
    pub errors: Vec<f64>,
    pub event: TerminalEvent,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &OdeState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Cubic Hermite value of `v` at `r` inside the covered range.
    pub fn dense_value(&self, r: f64) -> Option<f64> {
        let i = bracket(&self.states, r)?;
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        Some(hermite3(a.r, a.v, self.derivs[i], b.r, b.v, self.derivs[i + 1], r))
    }
}

fn bracket(states: &[OdeState], r: f64) -> Option<usize> {
    let first = states.first()?.r;
    let last = states.last()?.r;
    if !(r >= first && r <= last) || states.len() < 2 {
        return None;
    }
    let i = states.partition_point(|s| s.r <= r);
    Some(i.saturating_sub(1).min(states.len() - 2))
}

fn hermite3(x0: f64, y0: f64, d0: f64, x1: f64, y1: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Y = [f64; 2];

#[inline]
fn axpy(y: Y, h: f64, terms: &[(f64, &Y)]) -> Y {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

enum Step {
    Accepted { y: Y, k7: Y, err: f64 },
    Rejected { err: f64 },
    /// A stage left the region `v > 0`.
    Left,
}

fn dopri_step(eq: &RadialEquation, r: f64, y: Y, k1: Y, h: f64, tol: f64) -> Step {
    let stage = |dr: f64, ys: Y| -> Option<Y> {
        if ys[0] > 0.0 {
            let k = eq.rhs(r + dr, ys);
            (k[0].is_finite() && k[1].is_finite()).then_some(k)
        } else {
            None
        }
    };
    let y2 = axpy(y, h, &[(A21, &k1)]);
    let Some(k2) = stage(C2 * h, y2) else { return Step::Left };
    let y3 = axpy(y, h, &[(A31, &k1), (A32, &k2)]);
    let Some(k3) = stage(C3 * h, y3) else { return Step::Left };
    let y4 = axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
    let Some(k4) = stage(C4 * h, y4) else { return Step::Left };
    let y5 = axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
    let Some(k5) = stage(C5 * h, y5) else { return Step::Left };
    let y6 = axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
    let Some(k6) = stage(h, y6) else { return Step::Left };
    let yn = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let Some(k7) = stage(h, yn) else { return Step::Left };

    let mut e = [0.0; 2];
    for i in 0..2 {
        e[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    let rn = r + h;
    let sc_v = tol * y[0].abs().max(yn[0].abs());
    let sc_p = tol
        * y[1]
            .abs()
            .max(yn[1].abs())
            .max(eq.flux_scale(rn, yn[0]))
            .max(eq.flux_scale(r, y[0]));
    let err = (((e[0] / sc_v).powi(2) + (e[1] / sc_p).powi(2)) / 2.0).sqrt();
    if !err.is_finite() {
        return Step::Rejected { err: f64::INFINITY };
    }
    if err <= 1.0 {
        Step::Accepted { y: yn, k7, err }
    } else {
        Step::Rejected { err }
    }
}

/// Integrates the first-order system of `eq` from `s` to `to_r`.
///
/// Step control is relative: the error in `v` is measured against `tol |v|`
/// and the error in `P` against `tol max(|P|, r^{n-2} v^m)`.
pub fn advance(eq: &RadialEquation, s: OdeState, to_r: f64, tol: f64) -> Trajectory {
    assert!(s.r > 0.0 && s.v > 0.0 && to_r >= s.r, "advance needs 0 < r, 0 < v, r <= to_r");
    let mut traj = Trajectory {
        variable: eq.variable,
        states: vec![s],
        derivs: vec![eq.deriv_from_flux(s.r, s.v, s.flux)],
        errors: vec![0.0],
        event: TerminalEvent::ReachedRmax,
        rejected: 0,
    };
    if to_r == s.r {
        return traj;
    }

    let mut r = s.r;
    let mut y = [s.v, s.flux];
    let mut k1 = eq.rhs(r, y);
    let mut h = (0.01 * r).min(to_r - r);
    let mut err_prev: f64 = 1e-4;
    let mut left_region = false;

    loop {
        let h_max = MAX_REL_STEP * r;
        h = h.min(h_max);
        let mut last = false;
        if r + h >= to_r || r + 1.01 * h >= to_r {
            h = to_r - r;
            last = true;
        }
        if h < MIN_REL_STEP * r {
            traj.event = if left_region {
                TerminalEvent::ValueFloor
            } else {
                TerminalEvent::StepUnderflow
            };
            return traj;
        }
        match dopri_step(eq, r, y, k1, h, tol) {
            Step::Left => {
                left_region = true;
                traj.rejected += 1;
                h *= 0.5;
            }
            Step::Rejected { err } => {
                traj.rejected += 1;
                let fac = if err.is_finite() { 0.9 * err.powf(-0.2) } else { 0.1 };
                h *= fac.clamp(0.1, 0.9);
            }
            Step::Accepted { y: yn, k7, err } => {
                left_region = false;
                let rn = if last { to_r } else { r + h };
                let dv = k7[0];
                let prev_dv = k1[0];
                let event = if yn[0] <= VALUE_FLOOR {
                    Some(TerminalEvent::ValueFloor)
                } else if yn[0] >= 1.0 / VALUE_FLOOR {
                    Some(TerminalEvent::ValueBlowup)
                } else if dv.abs() >= 1.0 / VALUE_FLOOR {
                    Some(TerminalEvent::DerivBlowup)
                } else {
                    None
                };
                if let Some(event) = event {
                    let (r0, v0) = (r, y[0]);
                    let target = |x: f64| hermite3(r0, v0, prev_dv, rn, yn[0], dv, x);
                    let rc = match event {
                        TerminalEvent::ValueFloor => locate(r0, rn, |x| target(x) <= VALUE_FLOOR),
                        TerminalEvent::ValueBlowup => locate(r0, rn, |x| target(x) >= 1.0 / VALUE_FLOOR),
                        _ => rn,
                    };
                    let (vc, pc) = if rc < rn {
                        // a step landing on rc; interpolation if it is refused
                        match dopri_step(eq, r0, y, k1, rc - r0, tol) {
                            Step::Accepted { y: yc, .. } if yc[0] > 0.0 => (yc[0], yc[1]),
                            _ => {
                                let vc = target(rc).max(f64::MIN_POSITIVE);
                                let w = (rc - r0) / (rn - r0);
                                (vc, y[1] + w * (yn[1] - y[1]))
                            }
                        }
                    } else {
                        (yn[0], yn[1])
                    };
                    push(&mut traj, eq, OdeState { r: rc, v: vc, flux: pc }, 0.0);
                    traj.event = event;
                    return traj;
                }
                push(&mut traj, eq, OdeState { r: rn, v: yn[0], flux: yn[1] }, err);
                r = rn;
                y = yn;
                k1 = k7;
                if last {
                    return traj;
                }
                // PI controller
                let e = err.max(1e-10);
                let fac = 0.9 * e.powf(-0.17) * err_prev.powf(0.04);
                h *= fac.clamp(0.2, 5.0);
                err_prev = e;
            }
        }
    }
}

fn push(traj: &mut Trajectory, eq: &RadialEquation, s: OdeState, err: f64) {
    traj.derivs.push(eq.deriv_from_flux(s.r, s.v, s.flux));
    traj.states.push(s);
    traj.errors.push(err);
}

/// Smallest `x` in `(a, b]` with `hit(x)`, assuming `hit(b)`.
fn locate(mut a: f64, mut b: f64, hit: impl Fn(f64) -> bool) -> f64 {
    while b - a > EVENT_TOL * b.max(1.0) {
        let mid = 0.5 * (a + b);
        if hit(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

pub fn advance_f(p: &ProfileParams, s: OdeState, to_r: f64, tol: f64) -> Trajectory {
    advance(&RadialEquation::for_f(p), s, to_r, tol)
}

pub fn advance_g(p: &ProfileParams, s: OdeState, to_r: f64, tol: f64) -> Trajectory {
    advance(&RadialEquation::for_g(p), s, to_r, tol)
}

/// Continues a local solution to `r_max` and stitches both parts into a
/// profile. For the inverted problem `r_max` refers to the `g` variable and
/// the returned profile is the far-field `f` obtained by inversion.
///
/// The integrator starts from the local node closest to `eps/2`; the local
/// nodes in `(eps/2, eps]` are used only to measure the seam mismatch.
pub fn continue_profile(
    local: &LocalSolution,
    p: &ProfileParams,
    r_max: f64,
    tol: f64,
) -> Result<Profile> {
    if !(r_max > local.eps) {
        return Err(Error::domain(format!(
            "r_max = {r_max} violates r_max > eps = {}",
            local.eps
        )));
    }
    let variable = match local.problem_kind {
        ProblemKind::FOrigin => Variable::F,
        ProblemKind::GRegular | ProblemKind::GSingular => Variable::G,
    };
    let eq = RadialEquation::new(variable, p);

    let half = 0.5 * local.eps;
    let start = local.grid.partition_point(|r| *r < half).min(local.len() - 1);
    let r0 = local.grid[start];
    let s = OdeState {
        r: r0,
        v: local.value[start],
        flux: eq.flux_from_deriv(r0, local.value[start], local.deriv[start]),
    };
    let traj = advance(&eq, s, r_max, tol);

    let mut seam = 0.0f64;
    for j in start + 1..local.len() {
        if let Some(v) = traj.dense_value(local.grid[j]) {
            seam = seam.max((v - local.value[j]).abs() / local.boundary_value);
        }
    }

    // local nodes first, dropping the coarse ones near the origin and, for
    // the inverted problem, those where eta - g is lost to rounding
    let resolved = |j: usize| match variable {
        Variable::F => true,
        Variable::G => (local.boundary_value - local.value[j]) / local.boundary_value > MIN_DEFICIT,
    };
    let mut first = start;
    while first > 0 && local.grid[first] / local.grid[first - 1] <= MAX_NODE_RATIO && resolved(first - 1) {
        first -= 1;
    }
    let mut radii = local.grid[first..start].to_vec();
    let mut values = local.value[first..start].to_vec();
    let mut derivs = local.deriv[first..start].to_vec();
    radii.extend(traj.states.iter().map(|s| s.r));
    values.extend(traj.states.iter().map(|s| s.v));
    derivs.extend_from_slice(&traj.derivs);

    let samples = RadialSamples { variable, radii, values, derivs };
    let mut profile = match variable {
        Variable::F => Profile::from_samples(ProfileKind::Origin, *p, local.boundary_value, samples, None),
        Variable::G => {
            let f = invert_pointwise(&samples, p)?;
            Profile::from_samples(ProfileKind::FarField, *p, local.boundary_value, f, Some(samples))
        }
    };
    profile.terminal_event = traj.event;
    profile.seam_mismatch = seam;
    profile.eps = local.eps;
    profile.tol = tol;
    profile.rejected_steps = traj.rejected;

    if traj.event == TerminalEvent::ReachedRmax {
        Ok(profile)
    } else {
        Err(Error::ContinuationFailed {
            event: traj.event,
            radius: traj.last().r,
            partial: Box::new(profile),
        })
    }
}
