//! Independent solves over a set of parameter tuples on a bounded thread
//! pool.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, SolveReport};
use crate::error::Result;
use crate::inversion::Profile;
use crate::params::derive_params;
use crate::solve::{solve_farfield_partial, solve_origin_partial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveKind {
    Origin,
    FarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kind: SolveKind,
    pub n: u32,
    pub m: f64,
    pub rho1: f64,
    pub beta: f64,
    /// `eta0` or `eta`.
    pub boundary: f64,
}

impl SweepPoint {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.n.cmp(&other.n))
            .then(self.m.total_cmp(&other.m))
            .then(self.rho1.total_cmp(&other.rho1))
            .then(self.beta.total_cmp(&other.beta))
            .then(self.boundary.total_cmp(&other.boundary))
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: SweepPoint,
    /// The report of the (possibly partial) profile, or the error message of
    /// a solve that produced no profile at all.
    pub outcome: std::result::Result<SolveReport, String>,
}

/// Solves one tuple. A continuation that stops early still yields its
/// partial profile, whose terminal event records why.
pub fn solve_point(pt: &SweepPoint, r_max: f64, tol: f64) -> Result<Profile> {
    let p = derive_params(pt.n, pt.m, pt.rho1, pt.beta)?;
    match pt.kind {
        SolveKind::Origin => solve_origin_partial(&p, pt.boundary, r_max, tol),
        SolveKind::FarField => solve_farfield_partial(&p, pt.boundary, r_max, tol),
    }
}

/// Runs every tuple on `jobs` worker threads (all cores when `None`). Rows
/// come back sorted by `(kind, n, m, rho1, beta, boundary)`, so the result
/// does not depend on scheduling.
pub fn run_sweep(points: &[SweepPoint], r_max: f64, tol: f64, jobs: Option<usize>) -> Vec<SweepRow> {
    let work = || {
        points
            .par_iter()
            .map(|pt| SweepRow {
                point: *pt,
                outcome: solve_point(pt, r_max, tol).map(|pr| analyze(&pr)).map_err(|e| e.to_string()),
            })
            .collect::<Vec<_>>()
    };
    let mut rows = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    rows.sort_by(|a, b| a.point.key_cmp(&b.point));
    rows
}

/// `lo + (hi - lo) t` for each fraction `t`.
pub fn interior_points(lo: f64, hi: f64, fractions: &[f64]) -> Vec<f64> {
    fractions.iter().map(|t| lo + (hi - lo) * t).collect()
}

/// Three `m` per dimension `n = 3, 4, 5` and five `beta` spread over the
/// origin window, for both problem kinds with boundary datum 1.
pub fn standard_points() -> Vec<SweepPoint> {
    let ms: [(u32, [f64; 3]); 3] = [
        (3, [0.1, 0.2, 0.3]),
        (4, [0.2, 1.0 / 3.0, 0.45]),
        (5, [0.3, 0.45, 0.55]),
    ];
    let fractions = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut out = Vec::new();
    for (n, mlist) in ms {
        for m in mlist {
            let p = derive_params(n, m, 1.0, 0.0).expect("standard tuple");
            for beta in interior_points(-0.5, p.beta_threshold(), &fractions) {
                for kind in [SolveKind::Origin, SolveKind::FarField] {
                    out.push(SweepPoint { kind, n, m, rho1: 1.0, beta, boundary: 1.0 });
                }
            }
        }
    }
    out
}
