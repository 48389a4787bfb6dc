//! Randomized property suites over the function catalog. Each suite runs
//! at least 200 trials and asserts a structural identity of the strong
//! subdifferential or of the cone calculus built on it. The per-trial
//! checks live in `common` and are shared with the acceptance target.

mod common;

use common::{TOTAL_FNS, ZERO_AT_ORIGIN};
use proptest::prelude::*;

fn fn_id() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(TOTAL_FNS)
}

fn active_id() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(ZERO_AT_ORIGIN)
}

fn ok(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(220))]

    #[test]
    fn p1_midpoint_convexity_of_members(
        id in fn_id(),
        beta in 0.25f64..4.0,
        gamma in 0.0f64..2.0,
        xbar in -1.2f64..1.2,
        a in 0.3f64..2.0,
        b in 0.3f64..2.0,
        xi1 in -5.0f64..5.0,
        xi2 in -5.0f64..5.0,
    ) {
        ok(common::p1_check(id, beta, gamma, xbar, a, b, xi1, xi2))?;
    }

    #[test]
    fn p6_anti_monotonicity_in_the_window(
        id in fn_id(),
        beta in 0.25f64..4.0,
        gamma in 0.0f64..2.0,
        xbar in -1.2f64..1.2,
        a in 0.3f64..1.5,
        b in 0.3f64..1.5,
        grow_l in 0.0f64..2.0,
        grow_r in 0.0f64..2.0,
        xi in -5.0f64..5.0,
    ) {
        ok(common::p6_check(id, beta, gamma, xbar, a, b, grow_l, grow_r, xi))?;
    }

    #[test]
    fn ss_reduction_equivalence_on_the_sublevel_window(
        id in fn_id(),
        beta in 0.25f64..4.0,
        gamma in 0.0f64..2.0,
        xbar in -1.2f64..1.2,
        xi in -5.0f64..5.0,
    ) {
        ok(common::ss_reduction_check(id, beta, gamma, xbar, xi))?;
    }

    #[test]
    fn gp_inclusion_over_the_whole_line(
        id in fn_id(),
        beta in 0.25f64..4.0,
        gamma in 0.05f64..2.0,
        xbar in -1.2f64..1.2,
        xi in -5.0f64..5.0,
    ) {
        ok(common::gp_inclusion_check(id, beta, gamma, xbar, xi))?;
    }

    #[test]
    fn interior_dichotomy_on_the_concave_square(
        sign in proptest::bool::ANY,
        mag in 0.3f64..2.0,
        beta in 0.25f64..4.0,
        gamma in 0.05f64..2.0,
        xi in -5.0f64..5.0,
        xi_small in 0.05f64..1.0,
    ) {
        let xbar = if sign { mag } else { -mag };
        ok(common::dichotomy_check(xbar, beta, gamma, xi, xi_small))?;
    }

    #[test]
    fn forward_max_rule_inclusion(
        id1 in fn_id(),
        id2 in fn_id(),
        beta in 0.25f64..4.0,
        g1 in 0.0f64..2.0,
        g2 in 0.0f64..2.0,
        xbar in -1.0f64..1.0,
    ) {
        ok(common::max_rule_forward_check(id1, id2, beta, g1, g2, xbar))?;
    }

    #[test]
    fn lower_estimate_elements_satisfy_the_polar_inequality(
        id in active_id(),
        beta in 0.25f64..4.0,
        gamma in 0.0f64..2.0,
        w_left in 0.2f64..1.5,
        w_right in 0.2f64..1.5,
        k_left in 0.5f64..2.0,
        k_right in 0.5f64..2.0,
    ) {
        ok(common::polar_estimate_check(id, beta, gamma, w_left, w_right, k_left, k_right))?;
    }

    #[test]
    fn derivative_bound_for_members(
        id in active_id(),
        beta in 0.25f64..4.0,
        gamma in 0.0f64..2.0,
        a in 0.5f64..2.0,
        b in 0.5f64..2.0,
    ) {
        ok(common::derivative_bound_property_check(id, beta, gamma, a, b))?;
    }
}
