//! Node-by-node checks of the sign properties solved profiles must have.
//!
//! Each margin is the left-hand side divided by a positive scale of the same
//! size, so margins of different profiles are comparable.

use serde::{Deserialize, Serialize};

use crate::inversion::{Profile, ProfileKind, RadialSamples};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds { min_margin: f64 },
    FailsAt { r: f64, margin: f64 },
    NotApplicable { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::FailsAt { .. })
    }

    fn not_applicable(reason: &str) -> Self {
        Verdict::NotApplicable { reason: reason.to_string() }
    }
}

/// Checks `margin(i) > 0` at every node; reports the first failure.
fn check(radii: &[f64], margin: impl Fn(usize) -> f64) -> Verdict {
    let mut min_margin = f64::INFINITY;
    for (i, r) in radii.iter().enumerate() {
        let m = margin(i);
        if !(m > 0.0) {
            return Verdict::FailsAt { r: *r, margin: m };
        }
        min_margin = min_margin.min(m);
    }
    Verdict::Holds { min_margin }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// `f' < 0`.
    pub decreasing: Verdict,
    /// `f + m/(n-2) r f' > 0`.
    pub scaled_slope: Verdict,
    /// `f < eta r^{-(n-2)/m}`.
    pub upper_bound: Verdict,
    /// `alpha f + beta r f' > 0`, for `beta > 0`.
    pub weighted_f: Verdict,
    /// `alpha_tilde g + beta_tilde r g' > 0` on the inverted samples.
    pub weighted_g: Verdict,
}

impl InequalityReport {
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("decreasing", &self.decreasing),
            ("scaled_slope", &self.scaled_slope),
            ("upper_bound", &self.upper_bound),
            ("weighted_f", &self.weighted_f),
            ("weighted_g", &self.weighted_g),
        ]
    }

    pub fn any_fails(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| v.fails())
    }
}

pub fn verify_inequalities(profile: &Profile) -> InequalityReport {
    let p = &profile.params;
    let (r, f, df) = (&profile.radii, &profile.values, &profile.derivs);
    let slope_scale = |i: usize| f[i] + r[i] * df[i].abs();

    match profile.kind {
        ProfileKind::Origin => InequalityReport {
            decreasing: check(r, |i| -df[i] / slope_scale(i)),
            scaled_slope: Verdict::not_applicable("far-field profiles only"),
            upper_bound: Verdict::not_applicable("far-field profiles only"),
            weighted_f: Verdict::not_applicable("far-field profiles only"),
            weighted_g: Verdict::not_applicable("far-field profiles only"),
        },
        ProfileKind::FarField => {
            let c = p.m() / (p.dim() - 2.0);
            let a = p.fast_exponent();
            let eta = profile.boundary;
            let weighted_f = if p.beta() > 0.0 {
                let (al, be) = (p.alpha(), p.beta());
                check(r, |i| {
                    (al * f[i] + be * r[i] * df[i]) / (al * f[i] + be * r[i] * df[i].abs())
                })
            } else {
                Verdict::not_applicable("requires beta > 0")
            };
            let weighted_g = match (&profile.inverted, p.regime().weighted_monotone_applicable) {
                (Some(g), true) => weighted_g(g, p.alpha_tilde(), p.beta_tilde()),
                (None, _) => Verdict::not_applicable("no inverted samples"),
                (_, false) => Verdict::not_applicable(
                    "requires alpha_tilde > 0, beta_tilde != 0 and alpha_tilde/beta_tilde <= (n-2)/m",
                ),
            };
            let (scaled_slope, upper_bound) = match &profile.inverted {
                Some(g) => inverted_bounds(g, a, eta),
                None => (
                    check(r, |i| (f[i] + c * r[i] * df[i]) / slope_scale(i)),
                    check(r, |i| 1.0 - r[i].powf(a) * f[i] / eta),
                ),
            };
            InequalityReport {
                decreasing: Verdict::not_applicable("origin profiles only"),
                scaled_slope,
                upper_bound,
                weighted_f,
                weighted_g,
            }
        }
    }
}

/// The scaled-slope and upper-bound checks evaluated on the inverted
/// samples `g(x)`, `x = 1/r`. With `f = x^a g`,
/// `f + (m/(n-2)) r f' = -x^{a+1} g'/a` and `r^a f/eta = g/eta`, so the
/// margins are the same numbers as on the `f` side but free of the
/// cancellation there, which for small `m` is below rounding. Failures are
/// reported at the `f` radius.
fn inverted_bounds(g: &RadialSamples, a: f64, eta: f64) -> (Verdict, Verdict) {
    let (x, v, dv) = (&g.radii, &g.values, &g.derivs);
    let at = |i: usize| 1.0 / x[i];
    let scaled = check_mapped(x.len(), at, |i| {
        (-x[i] * dv[i] / a) / (v[i] + (a * v[i] + x[i] * dv[i]).abs())
    });
    // Near x = 0 the deficit eta - g can be below rounding of g; there it is
    // taken from the integral of g' instead.
    let mut deficit = Vec::with_capacity(x.len());
    let mut acc = -0.5 * x[0] * dv[0];
    deficit.push(acc);
    for i in 1..x.len() {
        acc -= 0.5 * (x[i] - x[i - 1]) * (dv[i] + dv[i - 1]);
        deficit.push(acc);
    }
    let upper = check_mapped(x.len(), at, |i| {
        let direct = 1.0 - v[i] / eta;
        if direct.abs() <= 4.0 * f64::EPSILON {
            deficit[i] / eta
        } else {
            direct
        }
    });
    (scaled, upper)
}

/// [`check`] over `len` nodes whose reported radius is `at(i)`; the first
/// failure in increasing radius is reported.
fn check_mapped(len: usize, at: impl Fn(usize) -> f64, margin: impl Fn(usize) -> f64) -> Verdict {
    let radii: Vec<f64> = (0..len).rev().map(&at).collect();
    check(&radii, |j| margin(len - 1 - j))
}

fn weighted_g(g: &RadialSamples, at: f64, bt: f64) -> Verdict {
    let (r, v, dv) = (&g.radii, &g.values, &g.derivs);
    check(r, |i| {
        (at * v[i] + bt * r[i] * dv[i]) / (at.abs() * v[i] + (bt * r[i] * dv[i]).abs())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `f' < 0` at every node.
    Decreasing,
    /// `f' > 0` before `r0` and `f' < 0` after it.
    InteriorMaximum { r0: f64 },
    /// Any other sign pattern of `f'`.
    Irregular,
}

pub fn classify_shape(profile: &Profile) -> Shape {
    let d = &profile.derivs;
    let first_neg = d.iter().position(|x| *x < 0.0);
    match first_neg {
        None => Shape::Irregular,
        Some(k) => {
            if d[k..].iter().any(|x| *x >= 0.0) {
                return Shape::Irregular;
            }
            if k == 0 {
                return Shape::Decreasing;
            }
            if d[..k].iter().any(|x| *x <= 0.0) {
                return Shape::Irregular;
            }
            // linear zero of f' between the two nodes around the sign change
            let (r1, r2) = (profile.radii[k - 1], profile.radii[k]);
            let (d1, d2) = (d[k - 1], d[k]);
            Shape::InteriorMaximum { r0: r1 + (r2 - r1) * d1 / (d1 - d2) }
        }
    }
}
