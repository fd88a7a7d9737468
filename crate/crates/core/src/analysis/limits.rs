//! Limit estimates at the origin and at infinity by Aitken extrapolation on a
//! geometric ladder of radii.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::Profile;

/// Far limits need data out to this radius.
pub const FAR_RANGE: f64 = 50.0;
/// Origin limits need data down to this radius.
pub const NEAR_RANGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Difference of the last two extrapolants.
    pub error: f64,
    /// Outermost (or innermost) ladder radius.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimits {
    /// `lim r^{(n-2)/m} f(r)`.
    pub l1: Option<LimitEstimate>,
    /// `lim r^{(n-2)/m + 1} f'(r)`.
    pub l2: Option<LimitEstimate>,
    /// `lim r^2 f(r)^{1-m}`. Exploratory: only meaningful for slow decay.
    pub l3: Option<LimitEstimate>,
    /// `2(n-2-nm)/((1-m) rho1)`, the value of `l3` implied by balancing the
    /// leading terms of the equation for slow decay.
    pub l3_balance: f64,
    /// `2(n-2-nm)/((1-m)(alpha(1-m) - beta))`, the constant quoted in the
    /// literature for the large-beta regime.
    pub l3_quoted: f64,
    /// `lim_{r -> 0} r f'/f`.
    pub slope_origin: Option<LimitEstimate>,
    /// `lim_{r -> infinity} r f'/f`.
    pub slope_infinity: Option<LimitEstimate>,
}

/// Extrapolates `q(x_0), ..., q(x_3)` sampled on a geometric ladder toward
/// the end of the ladder. Falls back to the last sample when the differences
/// do not shrink geometrically.
pub fn extrapolate(q: [f64; 4]) -> (f64, f64) {
    let aitken = |a: f64, b: f64, c: f64| {
        let d1 = b - a;
        let d2 = c - b;
        let denom = d2 - d1;
        let ratio = d2 / d1;
        if d1 != 0.0 && ratio.is_finite() && ratio > -1.0 && ratio < 1.0 && denom != 0.0 {
            Some(c - d2 * d2 / denom)
        } else {
            None
        }
    };
    match (aitken(q[0], q[1], q[2]), aitken(q[1], q[2], q[3])) {
        (Some(a), Some(b)) => (b, (b - a).abs()),
        _ => {
            let last = q[3];
            (last, (q[3] - q[2]).abs().max((q[2] - q[1]).abs()))
        }
    }
}

fn ladder(profile: &Profile, radii: [f64; 4], q: impl Fn(f64, f64, f64) -> f64) -> Option<LimitEstimate> {
    let mut vals = [0.0; 4];
    for (v, r) in vals.iter_mut().zip(radii) {
        let (f, df) = profile.eval(r)?;
        *v = q(r, f, df);
        if !v.is_finite() {
            return None;
        }
    }
    let (value, error) = extrapolate(vals);
    Some(LimitEstimate { value, error, radius: radii[3] })
}

pub fn asymptotic_limits(profile: &Profile) -> Result<AsymptoticLimits> {
    if profile.len() < 2 {
        return Err(Error::InsufficientRange("profile has fewer than two nodes".into()));
    }
    let p = &profile.params;
    let (n, m) = (p.dim(), p.m());
    let a = p.fast_exponent();
    let r_hi = *profile.radii.last().unwrap();
    let r_lo = profile.radii[0];
    let far = r_hi >= FAR_RANGE;
    let near = r_lo <= NEAR_RANGE;
    if !far && !near {
        return Err(Error::InsufficientRange(format!(
            "profile covers [{r_lo:e}, {r_hi:e}], needs r_max >= {FAR_RANGE} or r_min <= {NEAR_RANGE}"
        )));
    }
    let out = [r_hi / 8.0, r_hi / 4.0, r_hi / 2.0, r_hi];
    let inn = [8.0 * r_lo, 4.0 * r_lo, 2.0 * r_lo, r_lo];
    let far_limit = |q: &dyn Fn(f64, f64, f64) -> f64| if far { ladder(profile, out, q) } else { None };

    let l1 = far_limit(&|r, f, _| r.powf(a) * f);
    let l2 = far_limit(&|r, _, df| r.powf(a + 1.0) * df);
    let l3 = far_limit(&|r, f, _| r * r * f.powf(1.0 - m));
    let slope_infinity = far_limit(&|r, f, df| r * df / f);
    let slope_origin = if near { ladder(profile, inn, |r, f, df| r * df / f) } else { None };

    let gap = n - 2.0 - n * m;
    Ok(AsymptoticLimits {
        l1,
        l2,
        l3,
        l3_balance: 2.0 * gap / ((1.0 - m) * p.rho1()),
        l3_quoted: 2.0 * gap / ((1.0 - m) * (p.alpha() * (1.0 - m) - p.beta())),
        slope_origin,
        slope_infinity,
    })
}
