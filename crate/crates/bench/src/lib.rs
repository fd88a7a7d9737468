//! Parameter sets shared by the solver benchmarks.

use fdprofile::{derive_params, ProfileParams};

/// A named parameter set with the boundary datum used for both problems.
#[derive(Debug, Clone)]
pub struct Case {
    pub name: &'static str,
    pub params: ProfileParams,
    pub boundary: f64,
}

/// The closed-form case `n = 4, m = 1/3`, a generic decaying profile and a
/// small-`m` case whose inverted exponent is large.
pub fn cases() -> Vec<Case> {
    let case = |name, n, m, beta, boundary| Case {
        name,
        params: derive_params(n, m, 1.0, beta).expect("benchmark parameters are admissible"),
        boundary,
    };
    vec![
        case("n4_m1/3", 4, 1.0 / 3.0, 0.0, 1.0),
        case("n5_m0.45", 5, 0.45, 0.1, 1.0),
        case("n6_m0.065", 6, 0.065, 0.0, 1.0),
    ]
}

pub const TOL: f64 = 1e-9;
pub const R_MAX: f64 = 100.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_solves() {
        for c in cases() {
            fdprofile::solve::solve_origin_partial(&c.params, c.boundary, R_MAX, TOL).unwrap();
            fdprofile::solve::solve_farfield_partial(&c.params, c.boundary, R_MAX, TOL).unwrap();
        }
    }
}
