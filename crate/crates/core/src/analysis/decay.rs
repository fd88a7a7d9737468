//! Far-field decay classification and the search for the exponent `beta` at
//! which the origin profile decays at the fast rate.

use serde::{Deserialize, Serialize};

use super::limits::{extrapolate, FAR_RANGE};
use crate::error::{Error, Result};
use crate::integrate::TerminalEvent;
use crate::inversion::Profile;
use crate::params::derive_params;
use crate::solve::{solve_origin, solve_origin_partial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayKind {
    /// `r f'/f -> -(n-2)/m`.
    Fast,
    /// `r f'/f -> -2/(1-m)`.
    Slow,
    Undetermined,
    /// The profile reaches zero at a finite radius.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayClass {
    pub class: DecayKind,
    pub measured_slope: f64,
    /// Extrapolation error, when a far ladder was available.
    pub slope_error: Option<f64>,
    pub target_fast: f64,
    pub target_slow: f64,
}

fn log_slope(r: f64, f: f64, df: f64) -> f64 {
    r * df / f
}

pub fn classify_decay(profile: &Profile) -> DecayClass {
    let p = &profile.params;
    let target_fast = -p.fast_exponent();
    let target_slow = -p.slow_exponent();
    let band = (target_fast - target_slow).abs() / 4.0;
    let last = profile.len() - 1;
    let last_slope = log_slope(profile.radii[last], profile.values[last], profile.derivs[last]);
    let class = |class, measured_slope, slope_error| DecayClass {
        class,
        measured_slope,
        slope_error,
        target_fast,
        target_slow,
    };

    if profile.terminal_event == TerminalEvent::ValueFloor {
        return class(DecayKind::Vanishing, last_slope, None);
    }
    let r_hi = profile.radii[last];
    if r_hi < FAR_RANGE {
        return class(DecayKind::Undetermined, last_slope, None);
    }
    let mut q = [0.0; 4];
    for (k, v) in q.iter_mut().enumerate() {
        let r = r_hi / f64::from(1u32 << (3 - k));
        let (f, df) = profile.eval(r).expect("ladder inside profile range");
        *v = log_slope(r, f, df);
    }
    let (s, err) = extrapolate(q);
    let kind = if (s - target_fast).abs() < band {
        DecayKind::Fast
    } else if (s - target_slow).abs() < band {
        DecayKind::Slow
    } else {
        DecayKind::Undetermined
    };
    class(kind, s, Some(err))
}

/// Which side of the fast-decay exponent a probe fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// The log-slope dipped below `-(n-2)/m` (or the profile vanished).
    Below,
    /// The log-slope stayed above `-(n-2)/m`.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaProbe {
    pub beta: f64,
    pub side: Side,
    /// Minimum of `r f'/f` over the computed range.
    pub min_slope: f64,
    pub event: TerminalEvent,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSearch {
    pub beta: f64,
    /// Final bracket `(lo, hi)`.
    pub bracket: (f64, f64),
    /// Probes in the order they were run, the two initial ends first.
    pub history: Vec<BetaProbe>,
    pub probes: usize,
    /// The final bracket ends re-solved at a tenth of the ODE tolerance.
    pub certificate: (BetaProbe, BetaProbe),
}

#[derive(Debug, Clone, Copy)]
pub struct BetaSearchOptions {
    pub tol_beta: f64,
    /// ODE tolerance of each probe.
    pub tol: f64,
    /// Outer radius of each probe; capped internally so that a fast-decaying
    /// profile stays well above the extinction floor.
    pub r_max: f64,
}

impl Default for BetaSearchOptions {
    fn default() -> Self {
        BetaSearchOptions { tol_beta: 1e-4, tol: 1e-9, r_max: 1e4 }
    }
}

fn probe_radius(n: u32, m: f64, eta0: f64, r_max: f64) -> f64 {
    let a = f64::from(n - 2) / m;
    // radius scale of the profile with f(0) = eta0
    let ell = eta0.powf((m - 1.0) / 2.0);
    r_max.min(ell * (eta0 / 1e-25).powf(1.0 / a)).max(FAR_RANGE)
}

fn probe(n: u32, m: f64, rho1: f64, eta0: f64, beta: f64, r_max: f64, tol: f64) -> Result<BetaProbe> {
    let p = derive_params(n, m, rho1, beta)?;
    let profile = solve_origin_partial(&p, eta0, r_max, tol)?;
    let target = -p.fast_exponent();
    let vanished = profile.terminal_event == TerminalEvent::ValueFloor;
    let min_slope = if vanished {
        f64::NEG_INFINITY
    } else {
        (0..profile.len())
            .map(|i| log_slope(profile.radii[i], profile.values[i], profile.derivs[i]))
            .fold(f64::INFINITY, f64::min)
    };
    let side = if min_slope < target { Side::Below } else { Side::Above };
    Ok(BetaProbe {
        beta,
        side,
        min_slope,
        event: profile.terminal_event,
        radius: *profile.radii.last().unwrap(),
    })
}

/// Bisects for the exponent at which the origin profile has fast decay.
///
/// Each probe is a full origin solve. Below the exponent the log-slope
/// `r f'/f` falls under `-(n-2)/m` (the profile eventually vanishes); above
/// it the slope stays above that value and settles at the slow rate.
pub fn find_anomalous_beta(
    n: u32,
    m: f64,
    rho1: f64,
    eta0: f64,
    bracket: (f64, f64),
    tol_beta: f64,
) -> Result<BetaSearch> {
    find_anomalous_beta_with(n, m, rho1, eta0, bracket, BetaSearchOptions { tol_beta, ..Default::default() })
}

pub fn find_anomalous_beta_with(
    n: u32,
    m: f64,
    rho1: f64,
    eta0: f64,
    bracket: (f64, f64),
    opts: BetaSearchOptions,
) -> Result<BetaSearch> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    for b in [lo, hi] {
        derive_params(n, m, rho1, b)?.require_origin_window()?;
    }
    if !(opts.tol_beta > 0.0) {
        return Err(Error::domain(format!("tol_beta = {} violates tol_beta > 0", opts.tol_beta)));
    }
    if !(eta0 > 0.0) {
        return Err(Error::domain(format!("eta0 = {eta0} violates eta0 > 0")));
    }
    let r_max = probe_radius(n, m, eta0, opts.r_max);
    let run = |b: f64, tol: f64| probe(n, m, rho1, eta0, b, r_max, tol);

    let (plo, phi) = rayon::join(|| run(lo, opts.tol), || run(hi, opts.tol));
    let (plo, phi) = (plo?, phi?);
    let mut history = vec![plo, phi];
    if plo.side == phi.side {
        return Err(Error::BadBracket(format!(
            "both ends of [{lo}, {hi}] fall on the same side ({:?}) of the fast-decay slope",
            plo.side
        )));
    }
    let lo_side = plo.side;
    while hi - lo > opts.tol_beta {
        let mid = 0.5 * (lo + hi);
        let pm = run(mid, opts.tol)?;
        history.push(pm);
        if pm.side == lo_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (clo, chi) = rayon::join(|| run(lo, opts.tol / 10.0), || run(hi, opts.tol / 10.0));
    let (clo, chi) = (clo?, chi?);
    if clo.side == chi.side {
        return Err(Error::BadBracket(format!(
            "final bracket [{lo}, {hi}] does not separate at tolerance {:e}",
            opts.tol / 10.0
        )));
    }
    Ok(BetaSearch {
        beta: 0.5 * (lo + hi),
        bracket: (lo, hi),
        probes: history.len() + 2,
        history,
        certificate: (clo, chi),
    })
}

/// Classification of a single origin solve; convenience for callers that do
/// not need the profile itself.
pub fn classify_origin(n: u32, m: f64, rho1: f64, beta: f64, eta0: f64, r_max: f64, tol: f64) -> Result<DecayClass> {
    let p = derive_params(n, m, rho1, beta)?;
    match solve_origin(&p, eta0, r_max, tol) {
        Ok(profile) => Ok(classify_decay(&profile)),
        Err(Error::ContinuationFailed { partial, .. }) => Ok(classify_decay(&partial)),
        Err(e) => Err(e),
    }
}
