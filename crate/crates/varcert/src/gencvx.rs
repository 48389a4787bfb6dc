//! Generalized convexity: verification and refutation of strong
//! quasiconvexity, modulus estimation, the quadratic-fractional family,
//! and strong-minimum checks.
//!
//! `h` is strongly quasiconvex with modulus `γ >= 0` on a convex region
//! when for all `x, y` in the region and `λ ∈ [0, 1]`:
//!
//! ```text
//! h(λy + (1-λ)x) <= max{h(x), h(y)} - λ(1-λ)(γ/2)‖x-y‖².
//! ```
//!
//! `γ = 0` is plain quasiconvexity. Verification is by dense pair/λ
//! sampling and is always "on samples"; only refutation (a concrete
//! violating triple) is conclusive, and refuting witnesses are polished
//! by local pattern search before being reported.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexsets::SetOracle;
use crate::exec::{self, ExecMode};
use crate::funcspace::{Annotations, FnModel};
use crate::convexsets::RealSet1D;
use crate::TOL_MEMBER;

/// Errors from convexity analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcvxError {
    #[error("not quasiconvex on the region: gamma = 0 already refuted")]
    NotQuasiconvex,
    #[error("quadratic-fractional invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Pair/λ sampling plan for convexity checks.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Number of region sample points (lattice; all pairs are tested).
    pub points: usize,
    /// Number of λ values, uniform on [0, 1] including endpoints and,
    /// when odd, the midpoint.
    pub lambdas: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { points: 128, lambdas: 33 }
    }
}

impl SamplePlan {
    pub fn lambda_values(&self) -> Vec<f64> {
        let n = self.lambdas.max(2);
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }
}

/// Deterministic lattice sample of a region: uniform over the 1-D hull
/// or the axis-aligned box hint, filtered by membership.
pub fn sample_region(region: &SetOracle, points: usize) -> Vec<Vec<f64>> {
    let fallback = (vec![-8.0; region.dim], vec![8.0; region.dim]);
    let (lo, hi) = match (&region.interval, &region.box_hint) {
        (Some(set), _) if region.dim == 1 => {
            let l = set.inf().max(-1e3);
            let h = set.sup().min(1e3);
            (vec![l], vec![h])
        }
        (_, Some((l, h))) => (l.clone(), h.clone()),
        _ => fallback,
    };
    let dim = region.dim;
    let per_axis = (points as f64).powf(1.0 / dim as f64).ceil() as usize;
    let per_axis = per_axis.max(2);
    let mut pts = Vec::new();
    let total = per_axis.pow(dim as u32);
    for idx in 0..total {
        let mut x = Vec::with_capacity(dim);
        let mut rem = idx;
        for k in 0..dim {
            let i = rem % per_axis;
            rem /= per_axis;
            x.push(lo[k] + (hi[k] - lo[k]) * i as f64 / (per_axis - 1) as f64);
        }
        if region.contains_unchecked(&x) {
            pts.push(x);
        }
    }
    // Geometric refinement toward the box center: coarse lattices over
    // large boxes would otherwise miss fine structure near the origin.
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let span: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (h - l)).collect();
    for k in 1..=16 {
        let scale = 0.5f64.powi(k);
        for sign in [1.0, -1.0] {
            let x: Vec<f64> = center
                .iter()
                .zip(&span)
                .map(|(c, s)| c + sign * s * scale)
                .collect();
            if region.contains_unchecked(&x) {
                pts.push(x);
            }
        }
    }
    if region.contains_unchecked(&center) {
        pts.push(center);
    }
    pts
}

/// Outcome of a strong-quasiconvexity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SQStatus {
    /// The inequality held on every sampled triple (sampled evidence, not
    /// a certificate).
    Verified { sample_count: usize },
    /// A concrete violating triple, polished by local search.
    Refuted { x: Vec<f64>, y: Vec<f64>, lambda: f64, violation: f64 },
}

/// Report of [`sq_check`].
#[derive(Clone, Debug, Serialize)]
pub struct SQReport {
    pub status: SQStatus,
    pub gamma: f64,
    #[serde(skip)]
    pub region: SetOracle,
}

impl SQReport {
    pub fn is_verified(&self) -> bool {
        matches!(self.status, SQStatus::Verified { .. })
    }
}

/// Violation of the strong-quasiconvexity inequality at one triple:
/// positive means the inequality fails. Vacuous (`-inf`) when the
/// right-hand side is `+inf`.
fn sq_violation(h: &FnModel, gamma: f64, x: &[f64], y: &[f64], lambda: f64) -> f64 {
    let hx = h.eval_unchecked(x);
    let hy = h.eval_unchecked(y);
    let hmax = hx.max(hy);
    if hmax == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    let z: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    let hz = h.eval_unchecked(&z);
    let dsq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    hz - hmax + lambda * (1.0 - lambda) * (gamma / 2.0) * dsq
}

/// Pattern-search polish of a violating triple: maximize the violation
/// over local perturbations of `x`, `y` (kept in the region) and `λ`.
fn polish_witness(
    h: &FnModel,
    region: &SetOracle,
    gamma: f64,
    mut x: Vec<f64>,
    mut y: Vec<f64>,
    mut lambda: f64,
    mut step: f64,
) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let mut best = sq_violation(h, gamma, &x, &y, lambda);
    for _ in 0..60 {
        let mut improved = false;
        for k in 0..x.len() {
            for s in [step, -step] {
                let mut cx = x.clone();
                cx[k] += s;
                if region.contains_unchecked(&cx) {
                    let v = sq_violation(h, gamma, &cx, &y, lambda);
                    if v > best {
                        best = v;
                        x = cx;
                        improved = true;
                    }
                }
                let mut cy = y.clone();
                cy[k] += s;
                if region.contains_unchecked(&cy) {
                    let v = sq_violation(h, gamma, &x, &cy, lambda);
                    if v > best {
                        best = v;
                        y = cy;
                        improved = true;
                    }
                }
            }
        }
        for s in [step, -step] {
            let cl = (lambda + s).clamp(0.0, 1.0);
            let v = sq_violation(h, gamma, &x, &y, cl);
            if v > best {
                best = v;
                lambda = cl;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (x, y, lambda, best)
}

/// Check strong quasiconvexity of `h` with modulus `gamma` on a convex
/// region by exhaustive pair/λ sampling.
pub fn sq_check(h: &FnModel, region: &SetOracle, gamma: f64, plan: &SamplePlan) -> SQReport {
    let pts = sample_region(region, plan.points);
    let lambdas = plan.lambda_values();
    let pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .collect();
    let worst = exec::min_by_key(&pairs, ExecMode::default(), |&(i, j)| {
        let mut v = f64::NEG_INFINITY;
        for &l in &lambdas {
            v = v.max(sq_violation(h, gamma, &pts[i], &pts[j], l));
        }
        -v
    });
    let sample_count = pairs.len() * lambdas.len();
    match worst {
        Some((idx, neg_v)) if -neg_v > TOL_MEMBER => {
            let (i, j) = pairs[idx];
            let (_, lam) = lambdas
                .iter()
                .map(|&l| (sq_violation(h, gamma, &pts[i], &pts[j], l), l))
                .fold((f64::NEG_INFINITY, 0.0), |acc, c| if c.0 > acc.0 { c } else { acc });
            let step = if pts.len() > 1 {
                ((pts[1][0] - pts[0][0]).abs()).max(1e-3)
            } else {
                1e-2
            };
            let (x, y, lambda, violation) =
                polish_witness(h, region, gamma, pts[i].clone(), pts[j].clone(), lam, step);
            SQReport {
                status: SQStatus::Refuted { x, y, lambda, violation },
                gamma,
                region: region.clone(),
            }
        }
        _ => SQReport {
            status: SQStatus::Verified { sample_count },
            gamma,
            region: region.clone(),
        },
    }
}

/// Bisection estimate of the strong-quasiconvexity modulus on a bounded
/// region: returns `(gamma_lo, gamma_hi)` with `gamma_lo` verified on
/// samples, `gamma_hi` refuted (or equal to `gamma_lo` when the top of
/// the bracket is still verified), and gap at most `resolution`.
pub fn modulus_estimate(
    h: &FnModel,
    region: &SetOracle,
    plan: &SamplePlan,
    gamma_max: f64,
    resolution: f64,
) -> Result<(f64, f64), GcvxError> {
    if !(gamma_max > 0.0) || !(resolution > 0.0) {
        return Err(GcvxError::InvalidInput("need gamma_max > 0 and resolution > 0".into()));
    }
    if !sq_check(h, region, 0.0, plan).is_verified() {
        return Err(GcvxError::NotQuasiconvex);
    }
    if sq_check(h, region, gamma_max, plan).is_verified() {
        return Ok((gamma_max, gamma_max));
    }
    let (mut lo, mut hi) = (0.0, gamma_max);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if sq_check(h, region, mid, plan).is_verified() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

// ----- quadratic-fractional family ---------------------------------------

/// Which sufficient condition makes the quadratic fraction strongly
/// quasiconvex on `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfpCondition {
    /// `B = 0` (affine denominator).
    BZero,
    /// `f >= 0` on `K` (sampled) and `B` negative semidefinite.
    FNonnegBNegSemidef,
    /// `f <= 0` on `K` (sampled) and `B` positive semidefinite.
    FNonposBPosSemidef,
}

/// A quadratic fraction `h = f/g₂` with
/// `f(x) = ½⟨Ax,x⟩ + ⟨a,x⟩ + α`, `g₂(x) = ½⟨Bx,x⟩ + ⟨b,x⟩ + β`,
/// on `K = {x : m <= g₂(x) <= M}`. Under the declared condition, `h` is
/// strongly quasiconvex on `K` with modulus `λ_min(A)/M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QFPInstance {
    /// Row-major symmetric positive definite matrix.
    pub a_quad: Vec<Vec<f64>>,
    /// Row-major symmetric matrix (defaults to zero).
    #[serde(default)]
    pub b_quad: Vec<Vec<f64>>,
    #[serde(default)]
    pub a_lin: Vec<f64>,
    #[serde(default)]
    pub b_lin: Vec<f64>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta_const: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub m_cap: f64,
    pub condition: QfpCondition,
}

fn one() -> f64 {
    1.0
}

impl QFPInstance {
    pub fn dim(&self) -> usize {
        self.a_quad.len()
    }

    fn matrices(&self) -> Result<(DMatrix<f64>, DMatrix<f64>), GcvxError> {
        let dim = self.dim();
        if dim == 0 || self.a_quad.iter().any(|r| r.len() != dim) {
            return Err(GcvxError::InvalidInput("A must be square and nonempty".into()));
        }
        let a = DMatrix::from_fn(dim, dim, |i, j| self.a_quad[i][j]);
        let b = if self.b_quad.is_empty() {
            DMatrix::zeros(dim, dim)
        } else {
            if self.b_quad.len() != dim || self.b_quad.iter().any(|r| r.len() != dim) {
                return Err(GcvxError::InvalidInput("B must match the size of A".into()));
            }
            DMatrix::from_fn(dim, dim, |i, j| self.b_quad[i][j])
        };
        Ok((a, b))
    }

    fn vectors(&self) -> Result<(DVector<f64>, DVector<f64>), GcvxError> {
        let dim = self.dim();
        let fill = |v: &[f64], name: &str| -> Result<DVector<f64>, GcvxError> {
            if v.is_empty() {
                Ok(DVector::zeros(dim))
            } else if v.len() == dim {
                Ok(DVector::from_column_slice(v))
            } else {
                Err(GcvxError::InvalidInput(format!("{name} must have length {dim}")))
            }
        };
        Ok((fill(&self.a_lin, "a")?, fill(&self.b_lin, "b")?))
    }

    /// The region `K = {x : m <= g₂(x) <= M}` (with a sampling box hint).
    pub fn region_k(&self) -> Result<SetOracle, GcvxError> {
        let (_, b) = self.matrices()?;
        let (_, b_lin) = self.vectors()?;
        let (beta, m, m_cap) = (self.beta_const, self.m, self.m_cap);
        let dim = self.dim();
        let denom = move |x: &[f64]| -> f64 {
            let xv = DVector::from_column_slice(x);
            0.5 * (&b * &xv).dot(&xv) + b_lin.dot(&xv) + beta
        };
        let mut k = SetOracle::from_fn(dim, true, move |x: &[f64]| {
            let g = denom(x);
            m - 1e-12 <= g && g <= m_cap + 1e-12
        });
        k.box_hint = Some((vec![-8.0; dim], vec![8.0; dim]));
        if dim == 1 {
            let b0 = if self.b_quad.is_empty() { 0.0 } else { self.b_quad[0][0] };
            let b1 = if self.b_lin.is_empty() { 0.0 } else { self.b_lin[0] };
            if b0 == 0.0 {
                k.interval = Some(if b1 != 0.0 {
                    let (lo, hi) = ((m - beta) / b1, (m_cap - beta) / b1);
                    RealSet1D::closed(lo.min(hi), lo.max(hi))
                } else if m <= beta && beta <= m_cap {
                    RealSet1D::all()
                } else {
                    RealSet1D::empty()
                });
            }
        }
        Ok(k)
    }
}

fn eigen_range(mat: &DMatrix<f64>) -> (f64, f64) {
    let ev = mat.clone().symmetric_eigen().eigenvalues;
    ev.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Build the quadratic fraction as an [`FnModel`] restricted to `K`
/// (`+inf` outside), annotated with the modulus `λ_min(A)/M`.
/// Sign conditions on `f` are checked on a sample of `K` only; matrix
/// conditions are checked exactly via eigenvalues.
pub fn qfp_build(inst: &QFPInstance) -> Result<FnModel, GcvxError> {
    let (a, b) = inst.matrices()?;
    let (a_lin, b_lin) = inst.vectors()?;
    let dim = inst.dim();
    if (&a - a.transpose()).abs().max() > 1e-12 {
        return Err(GcvxError::InvariantViolation("A is not symmetric".into()));
    }
    if (&b - b.transpose()).abs().max() > 1e-12 {
        return Err(GcvxError::InvariantViolation("B is not symmetric".into()));
    }
    let (lambda_min_a, _) = eigen_range(&a);
    if lambda_min_a <= 0.0 {
        return Err(GcvxError::InvariantViolation("A is not positive definite".into()));
    }
    if !(0.0 < inst.m && inst.m <= inst.m_cap) {
        return Err(GcvxError::InvariantViolation("need 0 < m <= M".into()));
    }
    let region = inst.region_k()?;
    let numer = {
        let a = a.clone();
        let a_lin = a_lin.clone();
        let alpha = inst.alpha;
        move |x: &[f64]| -> f64 {
            let xv = DVector::from_column_slice(x);
            0.5 * (&a * &xv).dot(&xv) + a_lin.dot(&xv) + alpha
        }
    };
    let samples = sample_region(&region, 128);
    match inst.condition {
        QfpCondition::BZero => {
            if b.abs().max() > 0.0 {
                return Err(GcvxError::InvariantViolation("condition (a): B is not zero".into()));
            }
        }
        QfpCondition::FNonnegBNegSemidef => {
            let (_, lambda_max_b) = eigen_range(&b);
            if lambda_max_b > 1e-12 {
                return Err(GcvxError::InvariantViolation(
                    "condition (b): B is not negative semidefinite".into(),
                ));
            }
            if let Some(x) = samples.iter().find(|x| numer(x) < -TOL_MEMBER) {
                return Err(GcvxError::InvariantViolation(format!(
                    "condition (b): f negative on K at sampled point {x:?}"
                )));
            }
        }
        QfpCondition::FNonposBPosSemidef => {
            let (lambda_min_b, _) = eigen_range(&b);
            if lambda_min_b < -1e-12 {
                return Err(GcvxError::InvariantViolation(
                    "condition (c): B is not positive semidefinite".into(),
                ));
            }
            if let Some(x) = samples.iter().find(|x| numer(x) > TOL_MEMBER) {
                return Err(GcvxError::InvariantViolation(format!(
                    "condition (c): f positive on K at sampled point {x:?}"
                )));
            }
        }
    }
    let modulus = lambda_min_a / inst.m_cap;
    let denom = {
        let b_lin = b_lin.clone();
        let beta = inst.beta_const;
        move |x: &[f64]| -> f64 {
            let xv = DVector::from_column_slice(x);
            0.5 * (&b * &xv).dot(&xv) + b_lin.dot(&xv) + beta
        }
    };
    let in_k = region.clone();
    let mut f = FnModel::new(dim, region.clone(), move |x: &[f64]| {
        if in_k.contains_unchecked(x) {
            numer(x) / denom(x)
        } else {
            f64::INFINITY
        }
    });
    f.annotations = Annotations {
        continuous: Some(true),
        locally_lipschitz: Some(true),
        lsc: Some(true),
        usc: Some(true),
        quasiconvex: Some(true),
        sq_modulus: Some(modulus),
        sq_region_1d: if dim == 1 { region.interval.clone() } else { None },
        ..Annotations::default()
    };
    Ok(f)
}

// ----- strong minima ------------------------------------------------------

/// Outcome of a γ-strong-minimum check
/// (`h(x) >= h(x̄) + γ‖x - x̄‖²` on the region).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StrongMinVerdict {
    Holds { margin: f64 },
    Fails { witness: Vec<f64>, violation: f64 },
}

/// Verify that `x̄` is a γ-strong minimum of `h` on the sampled region.
pub fn strong_minimum_check(
    h: &FnModel,
    region: &SetOracle,
    xbar: &[f64],
    gamma: f64,
    plan: &SamplePlan,
) -> Result<StrongMinVerdict, GcvxError> {
    if !region.contains_unchecked(xbar) {
        return Err(GcvxError::InvalidInput("base point is outside the region".into()));
    }
    let h_bar = h.eval_unchecked(xbar);
    if !h_bar.is_finite() {
        return Err(GcvxError::InvalidInput("h(x̄) is not finite".into()));
    }
    let pts = sample_region(region, plan.points.max(256));
    let worst = exec::min_by_key(&pts, ExecMode::default(), |x| {
        let hx = h.eval_unchecked(x);
        if hx == f64::INFINITY {
            return f64::INFINITY;
        }
        let dsq: f64 = x.iter().zip(xbar).map(|(a, b)| (a - b) * (a - b)).sum();
        hx - h_bar - gamma * dsq
    });
    Ok(match worst {
        Some((idx, margin)) if margin < -TOL_MEMBER => StrongMinVerdict::Fails {
            witness: pts[idx].clone(),
            violation: -margin,
        },
        Some((_, margin)) => StrongMinVerdict::Holds { margin },
        None => StrongMinVerdict::Holds { margin: f64::INFINITY },
    })
}
