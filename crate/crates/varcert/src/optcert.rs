//! Optimality certificates for quasiconvex programs.
//!
//! Builds on the reconstructed subdifferentials from [`crate::strongsub`]
//! and the cone machinery from [`crate::levelcone`]:
//!
//! * generalized Fritz John / KKT certificates (`fj_residual`, `fj_search`),
//! * the Guignard-type constraint qualification (`gcq_check`),
//! * the non-degeneracy condition on horizon multipliers (`nnamc_check`),
//! * quadratic-growth sufficiency verification (`sufficiency_growth`,
//!   `qfp_sufficiency`),
//! * a quadratic-penalty route that produces stationarity evidence
//!   directly from local minimization (`penalize_certify`).
//!
//! Everything interval-valued is exact in dimension one (finite unions of
//! intervals); the penalization route also supports dimension two on a
//! sampled grid.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::convexsets::{RealSet1D, SetOracle};
use crate::exec::{self, ExecMode};
use crate::funcspace::{sublevel_isc_probe, FnModel, IscVerdict, LimitSchedule};
use crate::gencvx::{sq_check, QFPInstance, SamplePlan};
use crate::levelcone::{active_set, ConstraintSystem, LevelConeError};
use crate::strongsub::{
    classical_subdiff_1d, default_bracket, default_grid_1d, strong_interval_1d, strong_member,
    MembershipVerdict, SubdiffError, SubdiffKind,
};
use crate::{EPS_ACT, TOL_RESIDUAL};

/// Coarse simplex spacing for the multiplier search, in units of one.
const GRID_COARSE: f64 = 1.0 / 64.0;
/// Fine spacing used during local refinement of the best coarse cell.
const GRID_FINE: f64 = 1.0 / 1024.0;

// ----- errors -------------------------------------------------------------

#[derive(Debug, Error)]
pub enum CertError {
    #[error("base point is infeasible for the constraint system")]
    InfeasiblePoint,
    #[error("unsupported dimension {got}; this operation handles dim <= {max}")]
    UnsupportedDim { got: usize, max: usize },
    #[error("subgradient failed validation: {0}")]
    UnvalidatedSubgradient(String),
    #[error("certificate not validated: {0}")]
    CertificateNotValidated(String),
    #[error("numerator level {numerator} does not match alpha * denominator {scaled_denominator} at the base point")]
    ActiveLevelMismatch { numerator: f64, scaled_denominator: f64 },
    #[error("no finite grid minimizer inside the penalization ball")]
    NoGridMinimizer,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    LevelCone(#[from] LevelConeError),
    #[error(transparent)]
    Subdiff(#[from] SubdiffError),
}

// ----- certificates -------------------------------------------------------

/// How a stationarity certificate classifies the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Fritz John holds with `γ₀ > 0` and negligible residual.
    Kkt,
    /// Fritz John holds (negligible residual) but only with `γ₀ = 0`.
    Fj,
    /// No multiplier assignment on the search grid drives the residual
    /// below tolerance.
    NotCertifiable,
}

/// A generalized Fritz John certificate at a feasible base point.
///
/// The stationarity relation being certified is
///
/// `0 ∈ γ₀ ∂f(x̄) + γ̂₀ ∂^∞f(x̄) + Σ_{μ_j>0} μ_j ∂^{K_j}_{β_j,γ_j} g_j(x̄)
///      + Σ_{μ_j=0} ∂^∞g_j(x̄)`
///
/// with `γ₀ ≥ 0`, `μ_j ≥ 0`, `γ₀ + Σ μ_j = 1`, and `γ̂₀ = 1` exactly when
/// `γ₀ = 0`. The sums range over the active constraints.
#[derive(Clone, Debug, Serialize)]
pub struct FJCertificate {
    pub gamma0: f64,
    /// Indicator of the objective horizon term; `1` iff `gamma0 == 0`.
    pub gamma0_hat: u8,
    /// Multipliers for the active constraints, keyed by constraint index.
    /// A key with value `0.0` selects the horizon term for that index.
    pub mu: BTreeMap<usize, f64>,
    /// Chosen subgradients, keyed like `mu`: a strong subgradient when
    /// `μ_j > 0`, a horizon subgradient when `μ_j = 0`.
    pub subgradients: BTreeMap<usize, f64>,
    /// Chosen `v ∈ ∂f(x̄)` when `γ₀ > 0`, or `v_∞ ∈ ∂^∞f(x̄)` when
    /// `γ₀ = 0`.
    pub objective_vector: f64,
    /// Whether `‖v_∞‖ = 1` is guaranteed. Only the penalization route
    /// produces normalized horizon vectors; search certificates leave
    /// this `false`.
    pub unit_horizon: bool,
    /// `|γ₀ v + γ̂₀ v_∞ + Σ μ_j ξ_j + Σ ζ_j|` for the recorded choices.
    pub residual: f64,
    pub classification: Classification,
}

impl FJCertificate {
    /// Structural invariants: nonnegativity, the simplex constraint
    /// `γ₀ + Σ μ_j = 1`, and the `γ̂₀` indicator convention.
    pub fn check_invariants(&self, tol: f64) -> Result<(), CertError> {
        if self.gamma0 < -tol || self.mu.values().any(|&m| m < -tol) {
            return Err(CertError::CertificateNotValidated(
                "negative multiplier".into(),
            ));
        }
        let total = self.gamma0 + self.mu.values().sum::<f64>();
        if (total - 1.0).abs() > tol {
            return Err(CertError::CertificateNotValidated(format!(
                "multipliers sum to {total}, expected 1"
            )));
        }
        let hat_expected = if self.gamma0 == 0.0 { 1 } else { 0 };
        if self.gamma0_hat != hat_expected {
            return Err(CertError::CertificateNotValidated(
                "gamma0_hat must be 1 exactly when gamma0 = 0".into(),
            ));
        }
        Ok(())
    }
}

// ----- reconstructed 1-D data ---------------------------------------------

/// All the 1-D sets a certificate check needs, reconstructed once.
struct Sets1D {
    active: Vec<usize>,
    /// Limiting subdifferential of the objective at `x̄` (inner estimate).
    f_lim: RealSet1D,
    /// Horizon subdifferential of the objective at `x̄`.
    f_hor: RealSet1D,
    /// Strong subdifferential per active constraint (inner estimate).
    strong: BTreeMap<usize, RealSet1D>,
    /// Horizon subdifferential per active constraint.
    horizon: BTreeMap<usize, RealSet1D>,
}

fn reconstruct_sets(
    f: &FnModel,
    cs: &ConstraintSystem,
    xbar: &[f64],
) -> Result<Sets1D, CertError> {
    if cs.dim() != 1 || f.dim != 1 {
        return Err(CertError::UnsupportedDim { got: cs.dim().max(f.dim), max: 1 });
    }
    let active = active_set(cs, xbar, EPS_ACT).map_err(|e| match e {
        LevelConeError::InfeasiblePoint => CertError::InfeasiblePoint,
        other => CertError::LevelCone(other),
    })?;
    let sched = LimitSchedule::default();
    let f_lim = classical_subdiff_1d(f, xbar[0], SubdiffKind::Limiting, &sched)?.inner;
    let f_hor = classical_subdiff_1d(f, xbar[0], SubdiffKind::Horizon, &sched)?.inner;
    let mut strong = BTreeMap::new();
    let mut horizon = BTreeMap::new();
    for &j in &active {
        let approx =
            strong_interval_1d(&cs.gs[j], xbar[0], &cs.specs[j], default_bracket(), 1e-6)?;
        strong.insert(j, approx.inner);
        let hor =
            classical_subdiff_1d(&cs.gs[j], xbar[0], SubdiffKind::Horizon, &sched)?.inner;
        horizon.insert(j, hor);
    }
    Ok(Sets1D { active, f_lim, f_hor, strong, horizon })
}

// ----- small 1-D set utilities --------------------------------------------

/// Nearest point of a nonempty 1-D set to `a` (open endpoints are nudged
/// inward so the returned point is an honest member).
fn project_1d(set: &RealSet1D, a: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for iv in set.intervals() {
        let mut p = a.clamp(iv.lo, iv.hi);
        if !p.is_finite() {
            // Interval at infinity with `a` infinite cannot happen: `a`
            // is finite by construction; keep a defensive clamp anyway.
            p = p.clamp(-1e9, 1e9);
        }
        let nudge = 1e-9 * (1.0 + p.abs());
        if p == iv.lo && !iv.lo_closed {
            p += nudge;
        }
        if p == iv.hi && !iv.hi_closed {
            p -= nudge;
        }
        if !iv.contains(p) {
            continue;
        }
        if best.is_none_or(|b| (p - a).abs() < (b - a).abs()) {
            best = Some(p);
        }
    }
    best
}

/// Some element of the set with `|t| > tol`, if one exists.
fn nonzero_element(set: &RealSet1D, tol: f64) -> Option<f64> {
    for anchor in [1.0, -1.0, 10.0, -10.0] {
        if let Some(p) = project_1d(set, anchor) {
            if p.abs() > tol {
                return Some(p);
            }
        }
    }
    None
}

/// Split `target ∈ terms[0] + … + terms[n-1]` into one element per term.
/// Greedy sweep with exact interval feasibility at every step; falls back
/// to plain projection when floating-point slack empties an intersection.
fn decompose(terms: &[RealSet1D], target: f64) -> Vec<f64> {
    let n = terms.len();
    let mut suffix = vec![RealSet1D::singleton(0.0); n + 1];
    for i in (0..n).rev() {
        suffix[i] = terms[i].minkowski_sum(&suffix[i + 1]);
    }
    let mut out = Vec::with_capacity(n);
    let mut remaining = target;
    for i in 0..n {
        // t_i must satisfy remaining - t_i ∈ suffix[i+1].
        let feasible = terms[i].intersect(&suffix[i + 1].scale(-1.0).translate(remaining));
        let pick = project_1d(&feasible, 0.0)
            .or_else(|| project_1d(&terms[i], remaining))
            .unwrap_or(0.0);
        out.push(pick);
        remaining -= pick;
    }
    out
}

/// A point of `a` that is not in `b`, if any. Exact on interval unions:
/// tests every endpoint of `a`, every breakpoint of `b` interior to an
/// `a`-interval, and a midpoint of every gap between consecutive
/// breakpoints. Unbounded directions are tested at `±1e7`, beyond every
/// finite endpoint the library produces.
pub fn set_difference_witness(a: &RealSet1D, b: &RealSet1D) -> Option<f64> {
    const FAR: f64 = 1e7;
    for ia in a.intervals() {
        let lo = if ia.lo.is_finite() { ia.lo } else { -FAR };
        let hi = if ia.hi.is_finite() { ia.hi } else { FAR };
        let mut marks = vec![lo, hi];
        for ib in b.intervals() {
            for e in [ib.lo, ib.hi] {
                if e.is_finite() && e > lo && e < hi {
                    marks.push(e);
                }
            }
        }
        marks.sort_by(f64::total_cmp);
        let mut probes: Vec<f64> = Vec::new();
        for w in marks.windows(2) {
            probes.push(0.5 * (w[0] + w[1]));
        }
        probes.extend(marks);
        for p in probes {
            if ia.contains(p) || (!ia.lo.is_finite() && p == -FAR) || (!ia.hi.is_finite() && p == FAR)
            {
                let in_a = ia.contains(p)
                    || (!ia.lo.is_finite() && p <= hi)
                    || (!ia.hi.is_finite() && p >= lo);
                if in_a && !b.contains(p) {
                    return Some(p);
                }
            }
        }
    }
    None
}

// ----- residual of a fixed certificate ------------------------------------

/// Residual `|γ₀ v + γ̂₀ v_∞ + Σ μ_j ξ_j + Σ ζ_j|` of a certificate after
/// validating every recorded subgradient against its defining set:
/// strong subgradients by the membership inequality on the default grid,
/// horizon and objective subgradients against the reconstructed 1-D sets.
pub fn fj_residual(
    f: &FnModel,
    cs: &ConstraintSystem,
    xbar: &[f64],
    cert: &FJCertificate,
) -> Result<f64, CertError> {
    let sets = reconstruct_sets(f, cs, xbar)?;
    cert.check_invariants(1e-9)?;
    let mut sum = 0.0;
    // Objective term.
    if cert.gamma0 > 0.0 {
        if sets.f_lim.distance(cert.objective_vector) > 1e-6 {
            return Err(CertError::UnvalidatedSubgradient(format!(
                "objective vector {} is not in the limiting subdifferential",
                cert.objective_vector
            )));
        }
        sum += cert.gamma0 * cert.objective_vector;
    } else {
        if sets.f_hor.distance(cert.objective_vector) > 1e-6 {
            return Err(CertError::UnvalidatedSubgradient(format!(
                "objective horizon vector {} is not in the horizon subdifferential",
                cert.objective_vector
            )));
        }
        if cert.unit_horizon && (cert.objective_vector.abs() - 1.0).abs() > 1e-9 {
            return Err(CertError::UnvalidatedSubgradient(
                "unit_horizon is set but the horizon vector is not normalized".into(),
            ));
        }
        sum += cert.objective_vector;
    }
    // Constraint terms.
    for (&j, &mu_j) in &cert.mu {
        if !sets.active.contains(&j) {
            return Err(CertError::CertificateNotValidated(format!(
                "constraint {j} carries a multiplier but is inactive"
            )));
        }
        let xi = *cert.subgradients.get(&j).ok_or_else(|| {
            CertError::CertificateNotValidated(format!("no subgradient recorded for constraint {j}"))
        })?;
        if mu_j > 0.0 {
            let grid = default_grid_1d(&cs.specs[j].k, xbar[0], 8.0);
            match strong_member(&cs.gs[j], xbar, &cs.specs[j], &[xi], &grid)? {
                MembershipVerdict::Member { .. } => {}
                MembershipVerdict::NonMember { margin, .. } => {
                    return Err(CertError::UnvalidatedSubgradient(format!(
                        "xi = {xi} fails the strong membership inequality for constraint {j} (margin {margin:.3e})"
                    )));
                }
            }
            sum += mu_j * xi;
        } else {
            if sets.horizon[&j].distance(xi) > 1e-6 {
                return Err(CertError::UnvalidatedSubgradient(format!(
                    "zeta = {xi} is not in the horizon subdifferential of constraint {j}"
                )));
            }
            sum += xi;
        }
    }
    Ok(sum.abs())
}

// ----- certificate search -------------------------------------------------

/// Residual of one multiplier assignment, evaluated exactly over the
/// reconstructed interval sets: the attainable combination set is built
/// by Minkowski sums and the residual is its distance to the origin.
fn assignment_residual(sets: &Sets1D, gamma0: f64, mus: &BTreeMap<usize, f64>) -> f64 {
    let mut s = if gamma0 > 0.0 {
        if sets.f_lim.is_empty() {
            return f64::INFINITY;
        }
        sets.f_lim.scale(gamma0)
    } else {
        if sets.f_hor.is_empty() {
            return f64::INFINITY;
        }
        sets.f_hor.clone()
    };
    for (&j, &mu_j) in mus {
        let term = if mu_j > 0.0 {
            sets.strong[&j].scale(mu_j)
        } else {
            sets.horizon[&j].clone()
        };
        if term.is_empty() {
            return f64::INFINITY;
        }
        s = s.minkowski_sum(&term);
    }
    s.distance(0.0)
}

/// All ways to split `total` units into `parts` summands, each at least
/// `min_each`. Order matters (one slot per part).
fn compositions(total: i64, parts: usize, min_each: i64) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in min_each..=(total - min_each * (parts as i64 - 1)) {
        for mut rest in compositions(total - first, parts - 1, min_each) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Search the multiplier simplex for the minimal-residual generalized
/// Fritz John certificate at `x̄`.
///
/// The search enumerates every sign pattern of the active multipliers,
/// sweeps the simplex `γ₀ + Σ μ_j = 1` at spacing `1/64`, then refines
/// the best cell by pairwise redistribution at spacing `1/1024`. Positive
/// multipliers are kept at or above the coarse spacing during refinement:
/// assignments whose residual improves only as `μ_j → 0⁺` (an infimum
/// that is not attained) are reported at the grid floor instead of being
/// chased, so the reported residual stays meaningful.
pub fn fj_search(
    f: &FnModel,
    cs: &ConstraintSystem,
    xbar: &[f64],
) -> Result<FJCertificate, CertError> {
    let sets = reconstruct_sets(f, cs, xbar)?;
    let n_act = sets.active.len();
    let units = (1.0 / GRID_COARSE) as i64;

    let mut best: Option<(f64, f64, BTreeMap<usize, f64>)> = None;
    let mut consider = |residual: f64, gamma0: f64, mus: &BTreeMap<usize, f64>| {
        if best.as_ref().is_none_or(|(r, _, _)| residual < *r) {
            best = Some((residual, gamma0, mus.clone()));
        }
    };

    for mask in 0..(1u32 << n_act) {
        let positive: Vec<usize> = (0..n_act)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| sets.active[i])
            .collect();
        let zero: Vec<usize> = sets
            .active
            .iter()
            .copied()
            .filter(|j| !positive.contains(j))
            .collect();
        // γ₀ takes whatever the positive μ's leave; it may be zero.
        for gamma_units in 0..=(units - positive.len() as i64) {
            let comps = compositions(units - gamma_units, positive.len(), 1);
            for comp in comps {
                let gamma0 = gamma_units as f64 * GRID_COARSE;
                let mut mus: BTreeMap<usize, f64> = zero.iter().map(|&j| (j, 0.0)).collect();
                for (slot, &j) in positive.iter().enumerate() {
                    mus.insert(j, comp[slot] as f64 * GRID_COARSE);
                }
                let r = assignment_residual(&sets, gamma0, &mus);
                consider(r, gamma0, &mus);
            }
        }
    }

    let (mut residual, mut gamma0, mut mus) =
        best.ok_or_else(|| CertError::InvalidInput("empty multiplier search space".into()))?;

    // Local refinement: move mass between pairs of simplex coordinates.
    // The γ₀ = 0 / γ₀ > 0 regime is frozen (the attainable set changes
    // discontinuously across it, and the sweep above covered both sides).
    if residual.is_finite() {
        let positive: Vec<usize> = mus.iter().filter(|(_, &m)| m > 0.0).map(|(&j, _)| j).collect();
        let mut improved = true;
        let mut rounds = 0;
        while improved && rounds < 64 {
            improved = false;
            rounds += 1;
            let mut slots: Vec<Option<usize>> = vec![None]; // None = γ₀
            slots.extend(positive.iter().copied().map(Some));
            for &from in &slots {
                for &to in &slots {
                    if from == to {
                        continue;
                    }
                    for step in [8.0 * GRID_FINE, GRID_FINE] {
                        let mut g = gamma0;
                        let mut m = mus.clone();
                        let take = |g: &mut f64, m: &mut BTreeMap<usize, f64>,
                                    slot: Option<usize>, d: f64|
                         -> bool {
                            match slot {
                                None => {
                                    let nv = *g + d;
                                    // Keep γ₀ strictly positive in the
                                    // positive regime (floor = fine step).
                                    if gamma0 > 0.0 && nv < GRID_FINE - 1e-12 {
                                        return false;
                                    }
                                    if gamma0 == 0.0 {
                                        return false;
                                    }
                                    *g = nv;
                                    true
                                }
                                Some(j) => {
                                    let nv = m[&j] + d;
                                    if nv < GRID_COARSE - 1e-12 {
                                        return false;
                                    }
                                    m.insert(j, nv);
                                    true
                                }
                            }
                        };
                        if !take(&mut g, &mut m, from, -step) || !take(&mut g, &mut m, to, step) {
                            continue;
                        }
                        let r = assignment_residual(&sets, g, &m);
                        if r < residual - 1e-15 {
                            residual = r;
                            gamma0 = g;
                            mus = m;
                            improved = true;
                        }
                    }
                }
            }
        }
    }

    // Decompose the attained point into per-set choices for reporting.
    let mut terms: Vec<RealSet1D> = Vec::new();
    let obj_set = if gamma0 > 0.0 { sets.f_lim.scale(gamma0) } else { sets.f_hor.clone() };
    let mut order: Vec<Option<usize>> = vec![None];
    terms.push(obj_set);
    for (&j, &mu_j) in &mus {
        order.push(Some(j));
        terms.push(if mu_j > 0.0 {
            sets.strong[&j].scale(mu_j)
        } else {
            sets.horizon[&j].clone()
        });
    }
    let (objective_vector, subgradients) = if residual.is_finite() {
        let mut total = RealSet1D::singleton(0.0);
        for t in &terms {
            total = total.minkowski_sum(t);
        }
        let target = project_1d(&total, 0.0).unwrap_or(0.0);
        let parts = decompose(&terms, target);
        let mut subs = BTreeMap::new();
        let mut obj = 0.0;
        for (slot, part) in order.iter().zip(&parts) {
            match slot {
                None => obj = if gamma0 > 0.0 { part / gamma0 } else { *part },
                Some(j) => {
                    let mu_j = mus[j];
                    subs.insert(*j, if mu_j > 0.0 { part / mu_j } else { *part });
                }
            }
        }
        (obj, subs)
    } else {
        (0.0, BTreeMap::new())
    };

    let classification = if residual <= TOL_RESIDUAL {
        if gamma0 > 0.0 {
            Classification::Kkt
        } else {
            Classification::Fj
        }
    } else {
        Classification::NotCertifiable
    };
    Ok(FJCertificate {
        gamma0,
        gamma0_hat: if gamma0 == 0.0 { 1 } else { 0 },
        mu: mus,
        subgradients,
        objective_vector,
        unit_horizon: false,
        residual,
        classification,
    })
}

// ----- constraint qualification -------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GcqOutcome {
    Holds,
    /// A normal-cone element missing from the assembled multiplier union.
    FailsWitness { v: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct GcqReport {
    pub outcome: GcqOutcome,
    pub normal_cone: RealSet1D,
    /// The multiplier union, *without* taking closure or convex hull.
    pub assembled_union: RealSet1D,
}

/// Check the constraint qualification `N(Ω, x̄) ⊆ U` where `U` is the
/// plain (un-closed) union over sign patterns of
/// `Σ_{μ_j>0} μ_j ∂^{K_j}_{β_j,γ_j} g_j(x̄) + Σ_{μ_j=0} ∂^∞g_j(x̄)`,
/// the empty pattern contributing `{0}` as the empty sum.
///
/// The comparison is endpoint-exact on interval unions: whether the
/// union contains its boundary points matters here, which is exactly
/// what separates this condition from its closed relaxation.
pub fn gcq_check(cs: &ConstraintSystem, xbar: &[f64]) -> Result<GcqReport, CertError> {
    if cs.dim() != 1 {
        return Err(CertError::UnsupportedDim { got: cs.dim(), max: 1 });
    }
    let omega_int = cs.omega.interval.clone().ok_or_else(|| {
        CertError::InvalidInput("gcq_check needs an exact 1-D feasible set".into())
    })?;
    let active = active_set(cs, xbar, EPS_ACT).map_err(|e| match e {
        LevelConeError::InfeasiblePoint => CertError::InfeasiblePoint,
        other => CertError::LevelCone(other),
    })?;
    let sched = LimitSchedule::default();
    let mut strong = Vec::new();
    let mut horizon = Vec::new();
    for &j in &active {
        let approx =
            strong_interval_1d(&cs.gs[j], xbar[0], &cs.specs[j], default_bracket(), 1e-6)?;
        strong.push(approx.inner);
        horizon.push(classical_subdiff_1d(&cs.gs[j], xbar[0], SubdiffKind::Horizon, &sched)?.inner);
    }
    let n_act = active.len();
    let mut union = RealSet1D::empty();
    for mask in 0..(1u32 << n_act) {
        let mut family = RealSet1D::singleton(0.0);
        let mut alive = true;
        for i in 0..n_act {
            let term = if mask & (1 << i) != 0 {
                strong[i].pos_scalar_orbit()
            } else {
                horizon[i].clone()
            };
            if term.is_empty() {
                alive = false;
                break;
            }
            family = family.minkowski_sum(&term);
        }
        if alive {
            union = union.union(&family);
        }
    }
    let normal_cone = omega_int
        .normal_cone_at(xbar[0])
        .map_err(|_| CertError::InfeasiblePoint)?;
    let outcome = match set_difference_witness(&normal_cone, &union) {
        None => GcqOutcome::Holds,
        Some(v) => GcqOutcome::FailsWitness { v },
    };
    Ok(GcqReport { outcome, normal_cone, assembled_union: union })
}

// ----- non-degeneracy of horizon multipliers ------------------------------

#[derive(Clone, Debug, Serialize)]
pub enum NnamcOutcome {
    Holds,
    /// A nontrivial solution of `0 = w + Σ_{I⁺} μ_j v_j + Σ_{I⁰} v_j^∞`.
    AbnormalWitness {
        /// Active indices carrying `μ_j > 0` in the witness.
        mu_positive: Vec<usize>,
        /// The objective horizon component `w`.
        w: f64,
        /// Per-constraint components (`μ_j v_j` or `v_j^∞`).
        terms: BTreeMap<usize, f64>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct NnamcReport {
    pub outcome: NnamcOutcome,
    pub checked_patterns: usize,
}

/// Check the non-degeneracy condition: the only way to write
/// `0 = w + Σ_{I⁺} μ_j v_j + Σ_{I⁰} v_j^∞` with `w ∈ ∂^∞f(x̄)`,
/// `μ_j > 0`, `v_j` strong subgradients and `v_j^∞` horizon subgradients
/// is the trivial one (`w = 0`, `I⁺ = ∅`, every `v_j^∞ = 0`). Exact in
/// dimension one via interval arithmetic over the reconstructed sets.
pub fn nnamc_check(
    f: &FnModel,
    cs: &ConstraintSystem,
    xbar: &[f64],
) -> Result<NnamcReport, CertError> {
    let sets = reconstruct_sets(f, cs, xbar)?;
    let n_act = sets.active.len();
    let w_set = if sets.f_hor.is_empty() {
        // No horizon vectors at all: the relation has no solutions and
        // the condition holds vacuously for the `w` slot; treat as {0}
        // being absent entirely.
        RealSet1D::empty()
    } else {
        sets.f_hor.clone()
    };
    let mut checked = 0usize;
    for mask in 0..(1u32 << n_act) {
        checked += 1;
        let positive: Vec<usize> = (0..n_act)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| sets.active[i])
            .collect();
        let zero: Vec<usize> = sets
            .active
            .iter()
            .copied()
            .filter(|j| !positive.contains(j))
            .collect();
        if w_set.is_empty() {
            continue;
        }
        let mut terms: Vec<(Option<usize>, RealSet1D)> = vec![(None, w_set.clone())];
        let mut alive = true;
        for &j in &positive {
            let orbit = sets.strong[&j].pos_scalar_orbit();
            if orbit.is_empty() {
                alive = false;
                break;
            }
            terms.push((Some(j), orbit));
        }
        if alive {
            for &j in &zero {
                if sets.horizon[&j].is_empty() {
                    alive = false;
                    break;
                }
                terms.push((Some(j), sets.horizon[&j].clone()));
            }
        }
        if !alive {
            continue;
        }
        let total = terms
            .iter()
            .fold(RealSet1D::singleton(0.0), |acc, (_, t)| acc.minkowski_sum(t));
        if !total.contains(0.0) {
            continue;
        }
        if !positive.is_empty() {
            // Any exact decomposition with a positive-μ slot is abnormal.
            let term_sets: Vec<RealSet1D> = terms.iter().map(|(_, t)| t.clone()).collect();
            let parts = decompose(&term_sets, 0.0);
            let mut map = BTreeMap::new();
            let mut w = 0.0;
            for ((slot, _), part) in terms.iter().zip(&parts) {
                match slot {
                    None => w = *part,
                    Some(j) => {
                        map.insert(*j, *part);
                    }
                }
            }
            return Ok(NnamcReport {
                outcome: NnamcOutcome::AbnormalWitness { mu_positive: positive, w, terms: map },
                checked_patterns: checked,
            });
        }
        // Pure-horizon pattern: abnormal iff a decomposition exists with
        // some nonzero component. Check each slot for a nonzero value
        // compatible with the rest.
        for pivot in 0..terms.len() {
            let rest = terms
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pivot)
                .fold(RealSet1D::singleton(0.0), |acc, (_, (_, t))| acc.minkowski_sum(t));
            let feasible = terms[pivot].1.intersect(&rest.scale(-1.0));
            if let Some(t) = nonzero_element(&feasible, 1e-9) {
                let others: Vec<RealSet1D> = terms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != pivot)
                    .map(|(_, (_, s))| s.clone())
                    .collect();
                let other_parts = decompose(&others, -t);
                let mut map = BTreeMap::new();
                let mut w = 0.0;
                let mut it = other_parts.iter();
                for (i, (slot, _)) in terms.iter().enumerate() {
                    let val = if i == pivot { t } else { *it.next().unwrap() };
                    match slot {
                        None => w = val,
                        Some(j) => {
                            map.insert(*j, val);
                        }
                    }
                }
                return Ok(NnamcReport {
                    outcome: NnamcOutcome::AbnormalWitness { mu_positive: vec![], w, terms: map },
                    checked_patterns: checked,
                });
            }
        }
    }
    Ok(NnamcReport { outcome: NnamcOutcome::Holds, checked_patterns: checked })
}

// ----- sufficiency: quadratic growth --------------------------------------

/// Result of a sampled quadratic-growth verification around `x̄`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    /// Growth modulus `μ̄ = ½ Σ_{μ_j>0} β_j γ_j μ_j` (or `½ γ μ` on the
    /// quadratic-fractional route).
    pub mu_bar: f64,
    /// Radius of the verification neighborhood `V = B(x̄, r)`.
    pub v_radius: f64,
    pub sample_count: usize,
    /// Worst value of `rhs - μ̄‖y-x̄‖²` over the sampled `Ω ∩ V`
    /// (nonnegative means the inequality held everywhere).
    pub worst_gap: f64,
    /// Worst gap of the KKT-normalized inequality
    /// `(μ̄/γ₀)‖y-x̄‖² ≤ ⟨v, y-x̄⟩`, when `γ₀ > 0`.
    pub kkt_worst_gap: Option<f64>,
    /// Worst gap of `f(y) - f(x̄) - α‖y-x̄‖²` when the objective carries a
    /// strong-pseudoconvexity annotation with modulus `α`.
    pub pseudoconvex_worst_gap: Option<f64>,
    pub verified: bool,
}

/// Sample `Ω ∩ [x̄-r, x̄+r]` for a 1-D system: uniform lattice plus a
/// geometric cluster toward `x̄` so the small-`‖y-x̄‖` regime is covered.
fn growth_samples_1d(omega: &SetOracle, xbar: f64, r: f64, n: usize) -> Vec<f64> {
    let mut ys = Vec::new();
    let n = n.max(16);
    for i in 0..=n {
        let y = xbar - r + 2.0 * r * i as f64 / n as f64;
        if omega.contains_unchecked(&[y]) {
            ys.push(y);
        }
    }
    for k in 1..=24 {
        let t = r * 0.5f64.powi(k);
        for y in [xbar - t, xbar + t] {
            if omega.contains_unchecked(&[y]) {
                ys.push(y);
            }
        }
    }
    if omega.contains_unchecked(&[xbar]) {
        ys.push(xbar);
    }
    ys
}

/// Verify the quadratic growth guaranteed by a validated Fritz John
/// certificate under strong quasiconvexity of the active constraints:
///
/// `μ̄ ‖y-x̄‖² ≤ γ₀⟨v, y-x̄⟩ + γ̂₀⟨v_∞, y-x̄⟩` for `y ∈ Ω ∩ V`,
///
/// with `μ̄ = ½ Σ_{μ_j>0} β_j γ_j μ_j`, plus the `1/γ₀`-normalized KKT
/// variant when `γ₀ > 0`, plus the direct objective growth
/// `f(y) ≥ f(x̄) + α‖y-x̄‖²` when the objective is annotated strongly
/// pseudoconvex with modulus `α`.
///
/// Preconditions re-checked here: the certificate has negligible
/// residual (via [`fj_residual`]), every constraint with `μ_j > 0` is
/// strongly quasiconvex with modulus `γ_j` (annotation, or a sampled
/// check on `Ω ∩ V`), and its sublevel map is inner semicontinuous
/// (annotation, or a sampled probe).
pub fn sufficiency_growth(
    f: &FnModel,
    cs: &ConstraintSystem,
    xbar: &[f64],
    cert: &FJCertificate,
    v_radius: f64,
    n_grid: usize,
) -> Result<GrowthReport, CertError> {
    let residual = fj_residual(f, cs, xbar, cert)?;
    if residual > TOL_RESIDUAL {
        return Err(CertError::CertificateNotValidated(format!(
            "certificate residual {residual:.3e} exceeds tolerance"
        )));
    }
    if !(v_radius > 0.0) {
        return Err(CertError::InvalidInput("v_radius must be positive".into()));
    }
    let window = RealSet1D::closed(xbar[0] - v_radius, xbar[0] + v_radius);
    let local_omega = cs
        .omega
        .interval
        .clone()
        .map(|iv| iv.intersect(&window))
        .unwrap_or_else(|| window.clone());
    let mut mu_bar = 0.0;
    for (&j, &mu_j) in &cert.mu {
        if mu_j <= 0.0 {
            continue;
        }
        let spec = &cs.specs[j];
        mu_bar += 0.5 * spec.beta * spec.gamma * mu_j;
        // Strong quasiconvexity with modulus γ_j, locally.
        let g = &cs.gs[j];
        let annotated = g.annotations.sq_modulus.is_some_and(|m| {
            m >= spec.gamma - 1e-9
                && g.annotations
                    .sq_region_1d
                    .as_ref()
                    .is_none_or(|reg| local_omega.subset_of(reg, 1e-9))
        });
        if !annotated && spec.gamma > 0.0 {
            let region = SetOracle::from_interval(local_omega.clone());
            let report = sq_check(g, &region, spec.gamma, &SamplePlan::default());
            if !report.is_verified() {
                return Err(CertError::CertificateNotValidated(format!(
                    "constraint {j} is not strongly quasiconvex with modulus {} on the verification window",
                    spec.gamma
                )));
            }
        }
        // Inner semicontinuity of the sublevel map.
        match g.annotations.sublevel_isc {
            Some(true) => {}
            Some(false) => {
                return Err(CertError::CertificateNotValidated(format!(
                    "constraint {j} has a sublevel map known to fail inner semicontinuity"
                )));
            }
            None => {
                let v_oracle = SetOracle::ball(xbar.to_vec(), v_radius);
                let probe: Vec<Vec<f64>> =
                    growth_samples_1d(&SetOracle::whole_space(1), xbar[0], v_radius, 64)
                        .into_iter()
                        .map(|y| vec![y])
                        .collect();
                if let IscVerdict::ViolationWitness { .. } =
                    sublevel_isc_probe(g, xbar, &v_oracle, &probe)
                        .map_err(|e| CertError::InvalidInput(e.to_string()))?
                {
                    return Err(CertError::CertificateNotValidated(format!(
                        "constraint {j} failed the sublevel inner-semicontinuity probe"
                    )));
                }
            }
        }
    }

    let ys = growth_samples_1d(&cs.omega, xbar[0], v_radius, n_grid);
    let fbar = f.eval_unchecked(xbar);
    let alpha = f.annotations.strongly_pseudoconvex_alpha;
    let gaps = exec::map_collect(&ys, ExecMode::default(), |&y| {
        let d = y - xbar[0];
        let rhs = if cert.gamma0 > 0.0 {
            cert.gamma0 * cert.objective_vector * d
        } else {
            cert.objective_vector * d
        };
        let main = rhs - mu_bar * d * d;
        let kkt = if cert.gamma0 > 0.0 {
            Some(cert.objective_vector * d - (mu_bar / cert.gamma0) * d * d)
        } else {
            None
        };
        let pseudo = alpha.map(|a| f.eval_unchecked(&[y]) - fbar - a * d * d);
        (main, kkt, pseudo)
    });
    let worst_gap = gaps.iter().map(|(m, _, _)| *m).fold(f64::INFINITY, f64::min);
    let kkt_worst_gap = gaps
        .iter()
        .filter_map(|(_, k, _)| *k)
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.min(v))));
    let pseudoconvex_worst_gap = gaps
        .iter()
        .filter_map(|(_, _, p)| *p)
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.min(v))));
    let tol = 1e-7;
    let verified = worst_gap >= -tol && kkt_worst_gap.is_none_or(|g| g >= -tol);
    Ok(GrowthReport {
        mu_bar,
        v_radius,
        sample_count: ys.len(),
        worst_gap,
        kkt_worst_gap,
        pseudoconvex_worst_gap,
        verified,
    })
}

// ----- penalization route -------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct PenalizeStep {
    pub k: f64,
    /// Grid/pattern-search minimizer of `f + k·dist(·,Ω)² + ½‖·-x̄‖²`.
    pub y: Vec<f64>,
    /// Subgradient sample of `f` at `y`, recovered from the optimality
    /// identity `v = -2k(y - proj_Ω(y)) - (y - x̄)`.
    pub v: Vec<f64>,
    pub dist_to_omega: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PenalizeOutcome {
    /// Case (i): the subgradient samples stay bounded; `v` is a limiting
    /// subgradient candidate with `0 ∈ v + N(Ω, x̄)`.
    BoundedSubgradient { v: Vec<f64> },
    /// Case (ii): the samples blow up; the normalized direction is a
    /// horizon subgradient candidate (`‖v_∞‖ = 1` by construction).
    HorizonDirection { v_unit: Vec<f64> },
    /// The penalized minimizers do not approach `x̄`: evidence that `x̄`
    /// is not a local minimizer of `f` over `Ω`.
    NonStationaryEvidence { y_last: Vec<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct PenalizeReport {
    pub steps: Vec<PenalizeStep>,
    pub outcome: PenalizeOutcome,
    /// Distance from `-v` to `N(Ω, x̄)`, when the outcome is bounded and
    /// the feasible set is an exact 1-D interval union.
    pub stationarity_residual: Option<f64>,
}

fn nearest_in_omega(omega: &SetOracle, y: &[f64], samples: &[Vec<f64>]) -> Vec<f64> {
    if let Some(iv) = &omega.interval {
        if y.len() == 1 {
            if let Some(p) = project_1d(iv, y[0]) {
                return vec![p];
            }
        }
    }
    let norm2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
    };
    samples
        .iter()
        .min_by(|a, b| norm2(a, y).total_cmp(&norm2(b, y)))
        .cloned()
        .unwrap_or_else(|| y.to_vec())
}

/// Quadratic-penalty certification of stationarity at `x̄` for the
/// problem `min f over Ω` (dimension at most two).
///
/// For each penalty weight `k`, minimizes
/// `F_k = f + k·dist(·,Ω)² + ½‖·-x̄‖²` over `B(x̄, δ/2)` on a lattice
/// followed by pattern-search refinement, then reads off the regular
/// subgradient sample `v_k = -2k(y_k - proj_Ω(y_k)) - (y_k - x̄)` from
/// the first-order optimality of the smooth penalty parts.
pub fn penalize_certify(
    f: &FnModel,
    omega: &SetOracle,
    xbar: &[f64],
    delta: f64,
    k_schedule: &[f64],
) -> Result<PenalizeReport, CertError> {
    let dim = f.dim;
    if dim > 2 {
        return Err(CertError::UnsupportedDim { got: dim, max: 2 });
    }
    if omega.dim != dim || xbar.len() != dim {
        return Err(CertError::InvalidInput("dimension mismatch".into()));
    }
    if !omega.contains_unchecked(xbar) {
        return Err(CertError::InfeasiblePoint);
    }
    if k_schedule.is_empty() || !(delta > 0.0) {
        return Err(CertError::InvalidInput("need delta > 0 and a nonempty k schedule".into()));
    }
    let r = 0.5 * delta;
    let omega_samples = crate::gencvx::sample_region(omega, 4096);
    let in_ball = |y: &[f64]| -> bool {
        y.iter().zip(xbar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r + 1e-15
    };
    // Lattice over the ball.
    let per_axis: usize = if dim == 1 { 4000 } else { 160 };
    let mut grid: Vec<Vec<f64>> = Vec::new();
    match dim {
        1 => {
            for i in 0..=per_axis {
                grid.push(vec![xbar[0] - r + 2.0 * r * i as f64 / per_axis as f64]);
            }
        }
        _ => {
            for i in 0..=per_axis {
                for j in 0..=per_axis {
                    let y = vec![
                        xbar[0] - r + 2.0 * r * i as f64 / per_axis as f64,
                        xbar[1] - r + 2.0 * r * j as f64 / per_axis as f64,
                    ];
                    if in_ball(&y) {
                        grid.push(y);
                    }
                }
            }
        }
    }
    let spacing = 2.0 * r / per_axis as f64;

    let mut steps: Vec<PenalizeStep> = Vec::new();
    for &k in k_schedule {
        let value = |y: &[f64]| -> f64 {
            let fy = f.eval_unchecked(y);
            if !fy.is_finite() {
                return f64::INFINITY;
            }
            let p = nearest_in_omega(omega, y, &omega_samples);
            let d2: f64 = y.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
            let anchor: f64 = y.iter().zip(xbar).map(|(a, b)| (a - b) * (a - b)).sum();
            fy + k * d2 + 0.5 * anchor
        };
        let best = exec::min_by_key(&grid, ExecMode::default(), |y| value(y))
            .ok_or(CertError::NoGridMinimizer)?;
        if !best.1.is_finite() {
            return Err(CertError::NoGridMinimizer);
        }
        // Pattern-search refinement inside the ball.
        let mut y = grid[best.0].clone();
        let mut fy = best.1;
        let mut step = spacing;
        for _ in 0..120 {
            let mut moved = false;
            for axis in 0..dim {
                for sgn in [-1.0, 1.0] {
                    let mut cand = y.clone();
                    cand[axis] += sgn * step;
                    if !in_ball(&cand) {
                        continue;
                    }
                    let fc = value(&cand);
                    if fc < fy {
                        y = cand;
                        fy = fc;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
                if step < 1e-15 * (1.0 + r) {
                    break;
                }
            }
        }
        let proj = nearest_in_omega(omega, &y, &omega_samples);
        let v: Vec<f64> = (0..dim)
            .map(|i| -2.0 * k * (y[i] - proj[i]) - (y[i] - xbar[i]))
            .collect();
        let dist = y
            .iter()
            .zip(&proj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        steps.push(PenalizeStep { k, y, v, dist_to_omega: dist, objective: fy });
    }

    let last = steps.last().expect("nonempty schedule");
    let y_dist = last
        .y
        .iter()
        .zip(xbar)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm = |v: &[f64]| -> f64 { v.iter().map(|a| a * a).sum::<f64>().sqrt() };
    let v_last = norm(&last.v);
    let v_prev = if steps.len() >= 2 { norm(&steps[steps.len() - 2].v) } else { v_last };
    let outcome = if y_dist > delta / 8.0 {
        PenalizeOutcome::NonStationaryEvidence { y_last: last.y.clone() }
    } else if v_last > 10.0 && v_last > 2.0 * v_prev {
        PenalizeOutcome::HorizonDirection {
            v_unit: last.v.iter().map(|a| a / v_last).collect(),
        }
    } else {
        PenalizeOutcome::BoundedSubgradient { v: last.v.clone() }
    };
    let stationarity_residual = match (&outcome, &omega.interval) {
        (PenalizeOutcome::BoundedSubgradient { v }, Some(iv)) if dim == 1 => iv
            .normal_cone_at(xbar[0])
            .ok()
            .map(|n| n.distance(-v[0])),
        _ => None,
    };
    Ok(PenalizeReport { steps, outcome, stationarity_residual })
}

// ----- quadratic fractional sufficiency -----------------------------------

/// Sufficiency check tailored to quadratic-fractional constraints
/// `g₁/g₂ ≤ α` with `g₁` strongly convex (modulus `γ = λ_min(A)`) and
/// `g₂` positive affine: given multipliers `γ₀ + μ = 1`, `μ > 0`, and a
/// vector `v` with `0 ∈ γ₀ v + γ̂₀ v_∞ + μ ∂^{FM}(g₁ - α g₂)(x̄)`, the
/// growth `½ γ μ ‖y-x̄‖² ≤ γ₀⟨v, y-x̄⟩ + γ̂₀⟨v_∞, y-x̄⟩` is verified on
/// the sampled feasible window.
pub fn qfp_sufficiency(
    inst: &QFPInstance,
    alpha_level: f64,
    f: &FnModel,
    xbar: &[f64],
    cert: &FJCertificate,
    v_radius: f64,
    n_grid: usize,
) -> Result<GrowthReport, CertError> {
    let dim = inst.dim();
    if dim != 1 || f.dim != 1 {
        return Err(CertError::UnsupportedDim { got: dim.max(f.dim), max: 1 });
    }
    if inst.b_quad.iter().flatten().any(|&b| b.abs() > 1e-12) {
        return Err(CertError::InvalidInput(
            "the denominator must be affine (quadratic part zero)".into(),
        ));
    }
    cert.check_invariants(1e-9)?;
    let mu: f64 = cert.mu.values().sum();
    if mu <= 0.0 {
        return Err(CertError::CertificateNotValidated(
            "the quadratic-fractional route needs a positive constraint multiplier".into(),
        ));
    }
    if inst.a_quad.len() != dim || inst.a_quad.iter().any(|r| r.len() != dim) {
        return Err(CertError::InvalidInput("A must be square and match the dimension".into()));
    }
    let a_quad = inst.a_quad.clone();
    let a_lin = if inst.a_lin.is_empty() { vec![0.0; dim] } else { inst.a_lin.clone() };
    let b_lin = if inst.b_lin.is_empty() { vec![0.0; dim] } else { inst.b_lin.clone() };
    let alpha_num = inst.alpha;
    let g1 = move |x: &[f64]| -> f64 {
        let mut q = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                q += 0.5 * a_quad[i][j] * x[i] * x[j];
            }
        }
        q + a_lin.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + alpha_num
    };
    let beta_const = inst.beta_const;
    let g2 = move |x: &[f64]| -> f64 {
        b_lin.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + beta_const
    };
    let numerator = g1(xbar);
    let scaled_denominator = alpha_level * g2(xbar);
    if (numerator - scaled_denominator).abs() > 1e-7 * (1.0 + numerator.abs()) {
        return Err(CertError::ActiveLevelMismatch { numerator, scaled_denominator });
    }
    // Fenchel–Moreau subdifferential of φ = g₁ - α g₂ at x̄ (φ is convex).
    let phi = FnModel::scalar(RealSet1D::all(), move |x| g1(&[x]) - alpha_level * g2(&[x]));
    let fm = classical_subdiff_1d(&phi, xbar[0], SubdiffKind::FenchelMoreau, &LimitSchedule::default())?
        .inner;
    if fm.is_empty() {
        return Err(CertError::CertificateNotValidated(
            "empty Fenchel-Moreau subdifferential for the level function".into(),
        ));
    }
    let obj_term = if cert.gamma0 > 0.0 {
        cert.gamma0 * cert.objective_vector
    } else {
        cert.objective_vector
    };
    let residual = fm.scale(mu).translate(obj_term).distance(0.0);
    if residual > 1e-6 {
        return Err(CertError::CertificateNotValidated(format!(
            "stationarity residual {residual:.3e} over the Fenchel-Moreau set"
        )));
    }
    // γ = λ_min(A): strong-convexity modulus of the numerator.
    let a_mat = nalgebra::DMatrix::from_fn(dim, dim, |i, j| inst.a_quad[i][j]);
    let gamma = a_mat
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(gamma > 0.0) {
        return Err(CertError::InvalidInput("the numerator is not strongly convex".into()));
    }
    let mu_bar = 0.5 * gamma * mu;
    let region = inst.region_k().map_err(|e| CertError::InvalidInput(e.to_string()))?;
    let phi_tol = 1e-9;
    let mut ys = Vec::new();
    let n = n_grid.max(32);
    for i in 0..=n {
        let y = xbar[0] - v_radius + 2.0 * v_radius * i as f64 / n as f64;
        if region.contains_unchecked(&[y]) && phi.eval_unchecked(&[y]) <= phi_tol {
            ys.push(y);
        }
    }
    for k in 1..=24 {
        let t = v_radius * 0.5f64.powi(k);
        for y in [xbar[0] - t, xbar[0] + t] {
            if region.contains_unchecked(&[y]) && phi.eval_unchecked(&[y]) <= phi_tol {
                ys.push(y);
            }
        }
    }
    let gaps = exec::map_collect(&ys, ExecMode::default(), |&y| {
        let d = y - xbar[0];
        obj_term * d - mu_bar * d * d
    });
    let worst_gap = gaps.into_iter().fold(f64::INFINITY, f64::min);
    let verified = worst_gap >= -1e-7;
    Ok(GrowthReport {
        mu_bar,
        v_radius,
        sample_count: ys.len(),
        worst_gap,
        kkt_worst_gap: None,
        pseudoconvex_worst_gap: None,
        verified,
    })
}
