//! Normal-cone machinery for a feasible set
//! `Ω = {x : sup_j g_j(x) <= 0}` (declared convex): active sets, the
//! lower normal-cone estimate assembled from strong subdifferentials and
//! normal operators, Slater-type conditions, the equality theorem with
//! per-hypothesis status, and the max-rule calculus for suprema.
//!
//! The lower estimate is the closure of
//!
//! ```text
//! ∪_{μ >= 0} { Σ_{μ_j > 0} μ_j ∂^{K_j}_{β_j,γ_j} g_j(x̄)
//!            + Σ_{μ_j = 0} N_{g_j}(x̄) }  ⊆  N(Ω, x̄),
//! ```
//!
//! where `N_g(x̄) = (S_g(x̄) - x̄)°`. μ is handled by cone arithmetic
//! (the expression is positively homogeneous in each μ_j), so patterns
//! are enumerated as sign patterns only. The equality theorem replaces
//! the normal operators by horizon subdifferentials and requires a
//! Slater-type condition, a polar-cone inclusion, upper semicontinuity
//! plus F_H-regularity, and compactness (or pointedness) of the strong
//! subdifferentials; each hypothesis is checked and reported separately.
//! All exact set computations are 1-D interval arithmetic.

use serde::Serialize;
use thiserror::Error;

use crate::convexsets::{polar_member, tangent_contains, PolarVerdict, RealSet1D, SetOracle};
use crate::funcspace::{hadamard_upper, sublevel_interval_1d, FnModel, LimitSchedule};
use crate::strongsub::{
    classical_subdiff_1d, default_bracket, strong_interval_1d, strong_member,
    f_regularity_check_with_set, DerivVariant, FRegVerdict, SubdiffError, SubdiffKind,
    SubdiffSpec, default_grid_1d,
};
use crate::{EPS_ACT, TOL_MEMBER};

/// Errors from normal-cone computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelConeError {
    #[error("base point is infeasible (outside Ω or violating a constraint)")]
    InfeasiblePoint,
    #[error("operation requires dim = 1, got {0}")]
    UnsupportedDim(usize),
    #[error("inconsistent constraint system: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Subdiff(#[from] SubdiffError),
}

/// A finite constraint family `g_j <= 0` with per-constraint
/// subdifferential parameters and the (declared convex) feasible set.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub gs: Vec<FnModel>,
    pub specs: Vec<SubdiffSpec>,
    pub omega: SetOracle,
}

impl ConstraintSystem {
    pub fn new(
        gs: Vec<FnModel>,
        specs: Vec<SubdiffSpec>,
        omega: SetOracle,
    ) -> Result<Self, LevelConeError> {
        if gs.len() != specs.len() {
            return Err(LevelConeError::Mismatch(format!(
                "{} constraints but {} specs",
                gs.len(),
                specs.len()
            )));
        }
        if gs.is_empty() {
            return Err(LevelConeError::Mismatch("empty constraint family".into()));
        }
        let dim = gs[0].dim;
        if gs.iter().any(|g| g.dim != dim) || omega.dim != dim {
            return Err(LevelConeError::Mismatch("mixed dimensions".into()));
        }
        Ok(ConstraintSystem { gs, specs, omega })
    }

    pub fn dim(&self) -> usize {
        self.gs[0].dim
    }

    /// Spot-check the declared invariants on a sample grid: each sampled
    /// `x ∈ Ω` satisfies every constraint and lies in every `K_j` active
    /// at `x̄`, and Ω is midpoint-convex on samples.
    pub fn validate_on_samples(&self, xbar: &[f64]) -> Result<(), LevelConeError> {
        let active = active_set(self, xbar, EPS_ACT)?;
        let pts = crate::gencvx::sample_region(&self.omega, 64);
        for x in &pts {
            for (j, g) in self.gs.iter().enumerate() {
                if g.eval_unchecked(x) > EPS_ACT.max(1e-6) {
                    return Err(LevelConeError::Mismatch(format!(
                        "sampled x = {x:?} in Ω violates constraint {j}"
                    )));
                }
            }
            for &j in &active {
                if !self.specs[j].k.contains_unchecked(x) {
                    return Err(LevelConeError::Mismatch(format!(
                        "sampled x = {x:?} in Ω lies outside K_{j}"
                    )));
                }
            }
        }
        for pair in pts.windows(2) {
            let mid: Vec<f64> =
                pair[0].iter().zip(&pair[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            if !self.omega.contains_unchecked(&mid) {
                return Err(LevelConeError::Mismatch(
                    "Ω failed a midpoint convexity spot-check".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Active constraints at `x̄`: `{j : |g_j(x̄)| <= eps_act}`.
pub fn active_set(
    cs: &ConstraintSystem,
    xbar: &[f64],
    eps_act: f64,
) -> Result<Vec<usize>, LevelConeError> {
    if !cs.omega.contains_unchecked(xbar) {
        return Err(LevelConeError::InfeasiblePoint);
    }
    for g in &cs.gs {
        if g.eval_unchecked(xbar) > eps_act {
            return Err(LevelConeError::InfeasiblePoint);
        }
    }
    Ok((0..cs.gs.len())
        .filter(|&j| cs.gs[j].eval_unchecked(xbar).abs() <= eps_act)
        .collect())
}

/// One μ-sign-pattern family of the cone expression.
#[derive(Clone, Debug, Serialize)]
pub struct ConeFamily {
    /// Active indices with `μ_j > 0` (strong subdifferential orbit).
    pub mu_positive: Vec<usize>,
    /// Active indices with `μ_j = 0` (normal operator / horizon term).
    pub mu_zero: Vec<usize>,
    /// The family's contribution as an exact interval union (dim = 1).
    pub set_1d: RealSet1D,
}

/// Assembled cone with per-pattern generators; exact as an interval
/// union in dimension one.
#[derive(Clone, Debug, Serialize)]
pub struct ConeDescription {
    pub families: Vec<ConeFamily>,
    /// The reported interval is the closure of the family union.
    pub closed: bool,
    pub as_interval: RealSet1D,
    /// Every sampled element passed the polar membership test against Ω.
    pub validated_against_omega: bool,
}

/// Representative finite elements of a 1-D set (endpoints, midpoints,
/// and a bounded stand-in for infinite endpoints).
pub fn sample_set_1d(set: &RealSet1D) -> Vec<f64> {
    let mut out = Vec::new();
    for iv in set.intervals() {
        let lo = if iv.lo.is_finite() { iv.lo } else { -1e3 };
        let hi = if iv.hi.is_finite() { iv.hi } else { 1e3 };
        for v in [lo, hi, 0.5 * (lo + hi), 0.75 * lo + 0.25 * hi] {
            if set.contains(v) {
                out.push(v);
            }
        }
    }
    out.dedup();
    out
}

/// The normal operator `N_g(x̄) = (S_g(x̄) - x̄)°` as an interval union.
fn normal_operator_1d(g: &FnModel, xbar: f64) -> Result<RealSet1D, LevelConeError> {
    let sub = sublevel_interval_1d(g, xbar, false, xbar - 16.0, xbar + 16.0, 4096)
        .map_err(|_| LevelConeError::InfeasiblePoint)?;
    Ok(sub.polar_at(xbar))
}

/// Assemble the μ-pattern families with the given per-index sets for the
/// `μ_j > 0` slots (`strong[j]`) and `μ_j = 0` slots (`zero[j]`).
fn assemble_families(
    active: &[usize],
    strong: &[RealSet1D],
    zero: &[RealSet1D],
) -> (Vec<ConeFamily>, RealSet1D) {
    let n = active.len();
    let mut families = Vec::with_capacity(1 << n);
    let mut union = RealSet1D::empty();
    for mask in 0..(1u32 << n) {
        let mut set = RealSet1D::singleton(0.0);
        let mut mu_positive = Vec::new();
        let mut mu_zero = Vec::new();
        for (slot, &j) in active.iter().enumerate() {
            let positive = mask & (1 << slot) != 0;
            let term = if positive {
                mu_positive.push(j);
                strong[slot].pos_scalar_orbit()
            } else {
                mu_zero.push(j);
                zero[slot].clone()
            };
            set = set.minkowski_sum(&term);
        }
        union = union.union(&set);
        families.push(ConeFamily { mu_positive, mu_zero, set_1d: set });
    }
    (families, union.closure())
}

/// Lower estimate of `N(Ω, x̄)` from strong subdifferentials and normal
/// operators of the active constraints (dim = 1 exact). Sampled elements
/// of the result are validated against the polar of Ω at `x̄`.
pub fn normal_cone_lower(
    cs: &ConstraintSystem,
    xbar: &[f64],
) -> Result<ConeDescription, LevelConeError> {
    if cs.dim() != 1 {
        return Err(LevelConeError::UnsupportedDim(cs.dim()));
    }
    let active = active_set(cs, xbar, EPS_ACT)?;
    let mut strong = Vec::new();
    let mut zero = Vec::new();
    for &j in &active {
        let approx = strong_interval_1d(&cs.gs[j], xbar[0], &cs.specs[j], default_bracket(), 1e-6)?;
        strong.push(approx.inner);
        zero.push(normal_operator_1d(&cs.gs[j], xbar[0])?);
    }
    let (families, as_interval) = assemble_families(&active, &strong, &zero);
    let omega_grid = default_grid_1d(&cs.omega, xbar[0], 8.0);
    let validated = sample_set_1d(&as_interval).iter().all(|&v| {
        matches!(
            polar_member(&cs.omega, xbar, &[v], &omega_grid),
            Ok(PolarVerdict::Member { .. })
        )
    });
    Ok(ConeDescription {
        families,
        closed: true,
        as_interval,
        validated_against_omega: validated,
    })
}

/// Which Slater-type condition to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SlaterVariant {
    /// `d̂ ∈ D(Ω, x̄)` (feasible-direction cone).
    S,
    /// `d̂ ∈ ∩_j T(K_j, x̄)` over the active constraints.
    SN,
}

/// Outcome of a Slater-type search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SlaterOutcome {
    /// A direction with strictly negative support value on every active
    /// strong subdifferential.
    Holds { d: Vec<f64>, sigmas: Vec<f64> },
    /// No candidate worked. `vacuous` is set when some active strong
    /// subdifferential is empty, making its support value the empty-sup
    /// convention rather than evidence.
    NotFound { vacuous: bool },
}

/// Search candidate directions for the Slater-type condition. Defaults
/// add `ȳ - x̄` for sampled feasible `ȳ ≠ x̄` (sublevel-intersection
/// construction) to the supplied candidates.
pub fn slater_check(
    cs: &ConstraintSystem,
    xbar: &[f64],
    variant: SlaterVariant,
    candidate_dirs: &[Vec<f64>],
) -> Result<SlaterOutcome, LevelConeError> {
    if cs.dim() != 1 {
        return Err(LevelConeError::UnsupportedDim(cs.dim()));
    }
    let active = active_set(cs, xbar, EPS_ACT)?;
    let mut strong = Vec::new();
    let mut vacuous = false;
    for &j in &active {
        let approx = strong_interval_1d(&cs.gs[j], xbar[0], &cs.specs[j], default_bracket(), 1e-6)?;
        if approx.inner.is_empty() {
            vacuous = true;
        }
        strong.push(approx.inner);
    }
    if vacuous {
        return Ok(SlaterOutcome::NotFound { vacuous: true });
    }
    let mut dirs: Vec<Vec<f64>> = candidate_dirs.to_vec();
    for y in crate::gencvx::sample_region(&cs.omega, 32) {
        if (y[0] - xbar[0]).abs() > TOL_MEMBER {
            dirs.push(vec![y[0] - xbar[0]]);
        }
    }
    let sched = LimitSchedule::default();
    for d in dirs {
        if d.iter().all(|c| *c == 0.0) {
            continue;
        }
        let in_cone = match variant {
            SlaterVariant::S => {
                // d ∈ D(Ω, x̄) = R₊(Ω - x̄): some positive step stays in Ω.
                (0..=24).any(|k| {
                    let t = 0.5f64.powi(k);
                    let y: Vec<f64> = xbar.iter().zip(&d).map(|(x, di)| x + t * di).collect();
                    cs.omega.contains_unchecked(&y)
                })
            }
            SlaterVariant::SN => active
                .iter()
                .all(|&j| tangent_contains(&cs.specs[j].k, xbar, &d, &sched)),
        };
        if !in_cone {
            continue;
        }
        let sigmas: Vec<f64> = strong.iter().map(|s| s.support_value(d[0])).collect();
        if sigmas.iter().all(|&s| s < -TOL_MEMBER) {
            return Ok(SlaterOutcome::Holds { d, sigmas });
        }
    }
    Ok(SlaterOutcome::NotFound { vacuous: false })
}

/// Status of one hypothesis of the normal-cone equality theorem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum HypStatus {
    VerifiedExact,
    VerifiedSampled,
    Failed(String),
    VacuousFlagged(String),
}

impl HypStatus {
    pub fn holds(&self) -> bool {
        matches!(self, HypStatus::VerifiedExact | HypStatus::VerifiedSampled)
    }
}

/// Per-hypothesis report of the normal-cone equality check.
#[derive(Clone, Debug, Serialize)]
pub struct EqualityReport {
    /// (a) Slater-type condition over tangent cones.
    pub slater: HypStatus,
    /// (b) polar-cone inclusion into the tangent intersection.
    pub polar_inclusion: HypStatus,
    /// (c) horizon-in-polar inclusion, upper semicontinuity,
    /// F_H-regularity, per active constraint.
    pub horizon_usc_fh: HypStatus,
    /// (d) compactness, or closed pointed cone excluding 0.
    pub compactness: HypStatus,
    /// Assembled right-hand side (strong subdifferentials for `μ_j > 0`,
    /// horizon subdifferentials for `μ_j = 0`), convexified and closed.
    pub assembled: RealSet1D,
    /// `N(Ω, x̄)` from the exact interval description of Ω.
    pub normal_cone: RealSet1D,
    pub equality: bool,
    pub all_hypotheses_hold: bool,
}

/// Upper-semicontinuity probe at `x̄` along a shrinking schedule.
fn usc_sampled(g: &FnModel, xbar: f64, sched: &LimitSchedule) -> bool {
    let g_bar = g.eval_unchecked(&[xbar]);
    sched.steps_iter().rev().take(sched.tail).all(|t| {
        [xbar + t, xbar - t].iter().all(|&y| {
            let v = g.eval_unchecked(&[y]);
            v == f64::INFINITY || v <= g_bar + 1e-3
        })
    })
}

/// Evaluate the hypotheses of the normal-cone equality theorem and
/// compare the assembled cone with `N(Ω, x̄)` (dim = 1 exact).
pub fn normal_cone_equality_check(
    cs: &ConstraintSystem,
    xbar: &[f64],
) -> Result<EqualityReport, LevelConeError> {
    if cs.dim() != 1 {
        return Err(LevelConeError::UnsupportedDim(cs.dim()));
    }
    let active = active_set(cs, xbar, EPS_ACT)?;
    let sched = LimitSchedule::default();
    let mut strong = Vec::new();
    let mut horizon = Vec::new();
    for &j in &active {
        let approx = strong_interval_1d(&cs.gs[j], xbar[0], &cs.specs[j], default_bracket(), 1e-6)?;
        strong.push(approx.inner);
        horizon.push(classical_subdiff_1d(&cs.gs[j], xbar[0], SubdiffKind::Horizon, &sched)?.inner);
    }

    // (a) Slater-type condition over the tangent intersection.
    let slater = match slater_check(cs, xbar, SlaterVariant::SN, &[vec![1.0], vec![-1.0]])? {
        SlaterOutcome::Holds { .. } => HypStatus::VerifiedExact,
        SlaterOutcome::NotFound { vacuous: true } => HypStatus::VacuousFlagged(
            "an active strong subdifferential is empty; support values are vacuous".into(),
        ),
        SlaterOutcome::NotFound { vacuous: false } => {
            HypStatus::Failed("no candidate direction satisfied the Slater condition".into())
        }
    };

    // (b) polar-cone inclusion: directions in both polar intersections
    // must be tangent to every K_j. Empty sets give polar = whole line
    // (flagged).
    let mut any_empty = false;
    let polar_dirs = |sets: &[RealSet1D]| -> RealSet1D {
        let mut acc = RealSet1D::all();
        for s in sets {
            let cone = s.cone_hull();
            acc = acc.intersect(&cone.polar_at(0.0));
        }
        acc
    };
    for s in strong.iter().chain(horizon.iter()) {
        if s.is_empty() {
            any_empty = true;
        }
    }
    let lhs_b = polar_dirs(&strong).intersect(&polar_dirs(&horizon));
    let mut b_failed = None;
    for d in sample_set_1d(&lhs_b) {
        if d == 0.0 {
            continue;
        }
        for &j in &active {
            if !tangent_contains(&cs.specs[j].k, xbar, &[d], &sched) {
                b_failed = Some(format!("direction {d} is polar but not tangent to K_{j}"));
            }
        }
    }
    let polar_inclusion = match b_failed {
        Some(msg) => HypStatus::Failed(msg),
        None if any_empty => HypStatus::VacuousFlagged(
            "cone(∅) = {0} convention used for an empty subdifferential".into(),
        ),
        None => HypStatus::VerifiedSampled,
    };

    // (c) horizon-in-polar, usc, F_H-regularity per active constraint.
    let mut c_status = HypStatus::VerifiedSampled;
    for (slot, &j) in active.iter().enumerate() {
        let g = &cs.gs[j];
        let polar = normal_operator_1d(g, xbar[0])?;
        if !horizon[slot].subset_of(&polar, 1e-6) {
            c_status = HypStatus::Failed(format!(
                "horizon subdifferential of constraint {j} escapes the sublevel polar"
            ));
            break;
        }
        let usc_ok = cs.gs[j].annotations.usc.unwrap_or_else(|| usc_sampled(g, xbar[0], &sched));
        if !usc_ok {
            c_status =
                HypStatus::Failed(format!("constraint {j} is not upper semicontinuous at x̄"));
            break;
        }
        let dirs = vec![vec![1.0], vec![-1.0], vec![0.5], vec![-0.5]];
        match f_regularity_check_with_set(g, xbar, &strong[slot], &dirs, DerivVariant::Hadamard)
            .map_err(LevelConeError::Subdiff)?
        {
            FRegVerdict::Regular { vacuous } => {
                if vacuous && matches!(c_status, HypStatus::VerifiedSampled) {
                    c_status = HypStatus::VacuousFlagged(format!(
                        "constraint {j}: empty strong subdifferential makes F_H-regularity vacuous"
                    ));
                }
            }
            FRegVerdict::CounterDirection { d } => {
                c_status = HypStatus::Failed(format!(
                    "constraint {j} is not F_H-regular (counter-direction {d:?})"
                ));
                break;
            }
        }
    }

    // (d) compactness, or closed pointed cone with 0 excluded.
    let mut d_status = HypStatus::VerifiedExact;
    for (slot, &j) in active.iter().enumerate() {
        let s = &strong[slot];
        let compact = !s.is_empty() && s.is_bounded();
        let pointed = !s.is_empty() && !s.contains(0.0) && {
            // In 1-D the cone of a nonempty interval set avoiding 0 is a
            // closed ray once the set is separated from 0.
            s.inf() > TOL_MEMBER || s.sup() < -TOL_MEMBER
        };
        if s.is_empty() {
            d_status = HypStatus::VacuousFlagged(format!(
                "constraint {j}: empty strong subdifferential"
            ));
        } else if !compact && !pointed {
            d_status = HypStatus::Failed(format!(
                "constraint {j}: subdifferential neither compact nor a pointed cone avoiding 0"
            ));
            break;
        }
    }

    // Assemble the right-hand side with horizon subdifferentials in the
    // μ_j = 0 slots, then convexify and close.
    let (_, union) = assemble_families(&active, &strong, &horizon);
    let assembled = union.convex_hull().closure();
    let normal_cone = match &cs.omega.interval {
        Some(set) => set
            .normal_cone_at(xbar[0])
            .map_err(|_| LevelConeError::InfeasiblePoint)?,
        None => return Err(LevelConeError::Mismatch("Ω lacks an exact 1-D description".into())),
    };
    let equality = assembled.approx_eq(&normal_cone, 1e-5);
    let all = slater.holds() && polar_inclusion.holds() && c_status.holds() && d_status.holds();
    Ok(EqualityReport {
        slater,
        polar_inclusion,
        horizon_usc_fh: c_status,
        compactness: d_status,
        assembled,
        normal_cone,
        equality,
        all_hypotheses_hold: all,
    })
}

/// Outcome of the max-rule comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MaxRuleOutcome {
    Equality,
    /// The supremum-side subdifferential strictly contains the
    /// convexified union; `witness` belongs to the difference.
    InclusionOnly { witness: f64 },
}

/// Report of [`max_rule_check`].
#[derive(Clone, Debug, Serialize)]
pub struct MaxRuleReport {
    /// Every sampled element of the convexified union was certified in
    /// the supremum-side subdifferential (the forward inclusion).
    pub forward_inclusion_ok: bool,
    pub union_side: RealSet1D,
    pub sup_side: RealSet1D,
    pub outcome: MaxRuleOutcome,
}

/// Compare `cl co ∪_j ∂^{K_j}_{β,γ_j} g_j(x̄)` with
/// `∂^K_{β,γ_m} (sup_j g_j)(x̄)`, `γ_m = min` over active `γ_j`.
/// Requires a single shared `β` and `K ⊆ ∩ K_j` (declared).
pub fn max_rule_check(
    gs: &[FnModel],
    xbar: f64,
    specs: &[SubdiffSpec],
    k: &SetOracle,
) -> Result<MaxRuleReport, LevelConeError> {
    if gs.is_empty() || gs.len() != specs.len() {
        return Err(LevelConeError::Mismatch("need one spec per function".into()));
    }
    if gs.iter().any(|g| g.dim != 1) {
        return Err(LevelConeError::UnsupportedDim(gs[0].dim.max(1)));
    }
    let beta = specs[0].beta;
    if specs.iter().any(|s| (s.beta - beta).abs() > 1e-12) {
        return Err(LevelConeError::Mismatch("max rule requires a single shared beta".into()));
    }
    let g_bar: f64 = gs
        .iter()
        .map(|g| g.eval_unchecked(&[xbar]))
        .fold(f64::NEG_INFINITY, f64::max);
    if !g_bar.is_finite() {
        return Err(LevelConeError::InfeasiblePoint);
    }
    let active: Vec<usize> = (0..gs.len())
        .filter(|&j| (gs[j].eval_unchecked(&[xbar]) - g_bar).abs() <= EPS_ACT)
        .collect();
    let gamma_m = active
        .iter()
        .map(|&j| specs[j].gamma)
        .fold(f64::INFINITY, f64::min);

    let mut union_side = RealSet1D::empty();
    for &j in &active {
        let approx = strong_interval_1d(&gs[j], xbar, &specs[j], default_bracket(), 1e-6)?;
        union_side = union_side.union(&approx.inner);
    }
    let union_side = union_side.convex_hull().closure();

    // Supremum function on the shared domain.
    let models: Vec<FnModel> = gs.to_vec();
    let sup_fn = FnModel::new(1, SetOracle::whole_space(1), move |x: &[f64]| {
        models
            .iter()
            .map(|g| g.eval_unchecked(x))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let sup_spec = SubdiffSpec::new(beta, gamma_m, k.clone())?;
    let sup_approx = strong_interval_1d(&sup_fn, xbar, &sup_spec, default_bracket(), 1e-6)?;
    let sup_side = sup_approx.inner.clone();

    let y_grid = default_grid_1d(k, xbar, 8.0);
    let forward_inclusion_ok = sample_set_1d(&union_side).iter().all(|&w| {
        strong_member(&sup_fn, &[xbar], &sup_spec, &[w], &y_grid)
            .map(|v| v.is_member())
            .unwrap_or(false)
    });
    let outcome = if sup_side.approx_eq(&union_side, 1e-4) {
        MaxRuleOutcome::Equality
    } else {
        let witness = sample_set_1d(&sup_side)
            .into_iter()
            .find(|&w| !union_side.contains(w) && union_side.distance(w) > 1e-4)
            .unwrap_or(f64::NAN);
        MaxRuleOutcome::InclusionOnly { witness }
    };
    Ok(MaxRuleReport { forward_inclusion_ok, union_side, sup_side, outcome })
}

/// Lemma-style derivative bound: for tangent directions `d` and members
/// `w` of a strong subdifferential,
/// `λ⟨w, d⟩ <= β max{g^{H+}(x̄; d), 0}` for all `λ ∈ [0, 1]`.
pub fn derivative_bound_check(
    g: &FnModel,
    xbar: &[f64],
    spec: &SubdiffSpec,
    w: &[f64],
    d: &[f64],
    tol: f64,
) -> Result<bool, LevelConeError> {
    let sched = LimitSchedule::default();
    if !tangent_contains(&spec.k, xbar, d, &sched) {
        return Err(LevelConeError::Mismatch("direction is not tangent to K".into()));
    }
    let deriv = hadamard_upper(g, xbar, d, &sched).map_err(|_| LevelConeError::InfeasiblePoint)?;
    let bound = spec.beta * deriv.max(0.0);
    let dot: f64 = w.iter().zip(d).map(|(a, b)| a * b).sum();
    Ok([0.0, 0.5, 1.0].iter().all(|&l| l * dot <= bound + tol))
}
