//! Extended-real-valued function models, directional derivatives, and
//! sublevel-set machinery.
//!
//! A [`FnModel`] couples an evaluation oracle `R^dim -> R ∪ {+inf}` with a
//! domain oracle and optional analytic annotations (known strong-
//! quasiconvexity modulus, continuity flags, known subdifferential
//! formulas). The module also hosts [`catalog_instantiate`], the registry
//! of built-in piecewise test functions that the rest of the library and
//! the example corpus are checked against.
//!
//! Directional derivatives are computed on a geometric step schedule
//! ([`LimitSchedule`]); the reported value is the maximum difference
//! quotient over the tail of the schedule, a robust discretization of the
//! limsup for piecewise-defined functions. Extended-real conventions:
//! `+inf` absorbs in sums and maxima, and all comparisons against `+inf`
//! are total.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexsets::{RealSet1D, SetOracle};
use crate::TOL_MEMBER;

/// Errors from function-model construction and evaluation.
#[derive(Debug, Error)]
pub enum FnError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("base point is outside the effective domain (f(x) = +inf)")]
    PointOutsideDomain,
    #[error("unknown catalog id: {0}")]
    UnknownCatalogId(String),
    #[error("invalid catalog parameters: {0}")]
    InvalidParams(String),
}

// ----- limit schedules ----------------------------------------------------

/// Geometric schedule of step sizes `t0 * shrink^k`, `k = 0..steps`,
/// discretizing a limit `t -> 0+`. The reported value of a directional
/// derivative is the max quotient over the final `tail` steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSchedule {
    pub t0: f64,
    /// Multiplicative shrink factor in (0, 1).
    pub shrink: f64,
    pub steps: usize,
    /// Radius factor for direction perturbations in the Hadamard
    /// derivative: at step size `t`, directions within
    /// `direction_jitter * t` of `d` are also sampled.
    pub direction_jitter: f64,
    /// How many of the smallest steps enter the reported maximum.
    pub tail: usize,
}

impl Default for LimitSchedule {
    fn default() -> Self {
        LimitSchedule { t0: 1e-2, shrink: 0.5, steps: 30, direction_jitter: 1.0, tail: 10 }
    }
}

impl LimitSchedule {
    /// Step sizes from largest (`t0`) to smallest, in order.
    pub fn steps_iter(&self) -> impl DoubleEndedIterator<Item = f64> {
        let t0 = self.t0;
        let shrink = self.shrink;
        (0..self.steps).map(move |k| t0 * shrink.powi(k as i32))
    }

    /// Smallest step in the schedule.
    pub fn t_min(&self) -> f64 {
        self.t0 * self.shrink.powi(self.steps.saturating_sub(1) as i32)
    }

    pub fn is_valid(&self) -> bool {
        self.t0 > 0.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.steps > 0
            && self.direction_jitter >= 0.0
            && self.t_min() > 0.0
            && self.t_min().is_finite()
    }
}

// ----- annotations --------------------------------------------------------

/// A strong subdifferential with a known closed form:
/// `∂^K_{β,γ} f(x)` equals `value` (1-D functions only).
#[derive(Clone, Debug)]
pub struct KnownSubdiff {
    pub x: f64,
    pub beta: f64,
    pub gamma: f64,
    /// The constraint set `K`.
    pub k: RealSet1D,
    /// The exact subdifferential as an interval union.
    pub value: RealSet1D,
}

/// Analytic side information attached to a catalog function. Flags use
/// `Option<bool>`: `None` means "not asserted either way".
#[derive(Clone, Debug, Default)]
pub struct Annotations {
    /// Known strong-quasiconvexity modulus (on `sq_region` if present,
    /// otherwise on the whole effective domain).
    pub sq_modulus: Option<f64>,
    /// 1-D region on which `sq_modulus` is claimed.
    pub sq_region_1d: Option<RealSet1D>,
    pub lsc: Option<bool>,
    pub usc: Option<bool>,
    pub continuous: Option<bool>,
    pub locally_lipschitz: Option<bool>,
    /// Whether the sublevel map `x -> S_f(x)` is inner semicontinuous at
    /// the function's distinguished base point.
    pub sublevel_isc: Option<bool>,
    pub quasiconvex: Option<bool>,
    pub convex: Option<bool>,
    /// Strong-convexity modulus, when the function is strongly convex.
    pub strongly_convex_gamma: Option<f64>,
    /// Strong-pseudoconvexity modulus with respect to the limiting
    /// subdifferential.
    pub strongly_pseudoconvex_alpha: Option<f64>,
    /// Closed-form strong subdifferentials (1-D).
    pub known_strong_subdiffs: Vec<KnownSubdiff>,
}

// ----- function models ----------------------------------------------------

/// An extended-real-valued function `R^dim -> R ∪ {+inf}`. Proper by
/// construction: the oracle never returns `-inf`, and returns `+inf`
/// exactly off the effective domain described by `domain_hint`.
#[derive(Clone)]
pub struct FnModel {
    pub dim: usize,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub domain_hint: SetOracle,
    pub annotations: Annotations,
    /// Catalog id when instantiated from the catalog.
    pub id: Option<String>,
}

impl fmt::Debug for FnModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnModel")
            .field("dim", &self.dim)
            .field("id", &self.id)
            .field("domain_hint", &self.domain_hint)
            .finish_non_exhaustive()
    }
}

impl FnModel {
    /// General constructor. The oracle is trusted to satisfy the
    /// properness invariants.
    pub fn new(
        dim: usize,
        domain_hint: SetOracle,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnModel {
            dim,
            eval: Arc::new(eval),
            domain_hint,
            annotations: Annotations::default(),
            id: None,
        }
    }

    /// 1-D constructor that enforces `f = +inf` exactly off `domain`.
    pub fn scalar(domain: RealSet1D, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let dom = domain.clone();
        FnModel::new(1, SetOracle::from_interval(domain), move |x: &[f64]| {
            if dom.contains(x[0]) {
                eval(x[0])
            } else {
                f64::INFINITY
            }
        })
    }

    /// Evaluation without the dimension check, for hot loops.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn with_annotations(mut self, a: Annotations) -> Self {
        self.annotations = a;
        self
    }
}

/// Evaluate `f(x)`, returning `+inf` outside the effective domain.
pub fn eval_extended(f: &FnModel, x: &[f64]) -> Result<f64, FnError> {
    if x.len() != f.dim {
        return Err(FnError::DimensionMismatch { expected: f.dim, got: x.len() });
    }
    Ok(f.eval_unchecked(x))
}

// ----- directional derivatives --------------------------------------------

fn check_base(f: &FnModel, x: &[f64], d: &[f64]) -> Result<f64, FnError> {
    if x.len() != f.dim {
        return Err(FnError::DimensionMismatch { expected: f.dim, got: x.len() });
    }
    if d.len() != f.dim {
        return Err(FnError::DimensionMismatch { expected: f.dim, got: d.len() });
    }
    let fx = f.eval_unchecked(x);
    if !fx.is_finite() {
        return Err(FnError::PointOutsideDomain);
    }
    Ok(fx)
}

fn quotient(f: &FnModel, x: &[f64], d: &[f64], fx: f64, t: f64, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(x.iter().zip(d).map(|(xi, di)| xi + t * di));
    let fy = f.eval_unchecked(buf);
    if fy == f64::INFINITY {
        f64::INFINITY
    } else {
        (fy - fx) / t
    }
}

/// Upper Dini directional derivative
/// `limsup_{t -> 0+} (f(x + t d) - f(x)) / t`, approximated as the max
/// difference quotient over the tail of the schedule. Divergent quotients
/// are reported as `+inf`, not as an error.
pub fn dini_upper(f: &FnModel, x: &[f64], d: &[f64], sched: &LimitSchedule) -> Result<f64, FnError> {
    let fx = check_base(f, x, d)?;
    let mut buf = Vec::with_capacity(f.dim);
    let mut best = f64::NEG_INFINITY;
    for t in sched.steps_iter().rev().take(sched.tail.max(1)) {
        let q = quotient(f, x, d, fx, t, &mut buf);
        if q > best {
            best = q;
        }
    }
    Ok(best)
}

/// Upper Hadamard directional derivative
/// `limsup_{t -> 0+, d' -> d} (f(x + t d') - f(x)) / t`: as [`dini_upper`]
/// but additionally maximizing over perturbed directions `d'` with
/// `‖d' - d‖ <= direction_jitter * t`. Always `>= dini_upper` on the same
/// schedule, since the unperturbed direction is included.
pub fn hadamard_upper(
    f: &FnModel,
    x: &[f64],
    d: &[f64],
    sched: &LimitSchedule,
) -> Result<f64, FnError> {
    let fx = check_base(f, x, d)?;
    let mut buf = Vec::with_capacity(f.dim);
    let mut dir = vec![0.0; f.dim];
    let mut best = f64::NEG_INFINITY;
    for t in sched.steps_iter().rev().take(sched.tail.max(1)) {
        let j = sched.direction_jitter * t;
        // The exact direction plus axis-aligned perturbations at the full
        // and half jitter radius.
        for scale in [0.0, j, -j, 0.5 * j, -0.5 * j] {
            for axis in 0..f.dim {
                if scale == 0.0 && axis > 0 {
                    continue;
                }
                dir.copy_from_slice(d);
                dir[axis] += scale;
                let q = quotient(f, x, &dir, fx, t, &mut buf);
                if q > best {
                    best = q;
                }
            }
        }
    }
    Ok(best)
}

// ----- sublevel machinery -------------------------------------------------

/// Membership oracle for the sublevel set `S_f(x) = {y : f(y) <= f(x)}`,
/// or the strict variant `{y : f(y) < f(x)}`.
pub fn sublevel_set(f: &FnModel, x: &[f64], strict: bool) -> Result<SetOracle, FnError> {
    if x.len() != f.dim {
        return Err(FnError::DimensionMismatch { expected: f.dim, got: x.len() });
    }
    let level = f.eval_unchecked(x);
    if !level.is_finite() {
        return Err(FnError::PointOutsideDomain);
    }
    let g = f.clone();
    // Sublevel sets of quasiconvex functions are convex.
    let convex = f.annotations.quasiconvex == Some(true) || f.annotations.convex == Some(true);
    Ok(SetOracle::from_fn(f.dim, convex, move |y: &[f64]| {
        let v = g.eval_unchecked(y);
        if strict {
            v < level
        } else {
            v <= level
        }
    }))
}

/// Exact-ish 1-D description of a sublevel set on `[lo, hi]`: grid scan
/// followed by bisection refinement of each membership boundary.
pub fn sublevel_interval_1d(
    f: &FnModel,
    x: f64,
    strict: bool,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<RealSet1D, FnError> {
    let oracle = sublevel_set(f, &[x], strict)?;
    let member = |y: f64| oracle.contains_unchecked(&[y]);
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut start: Option<f64> = None;
    let step = (hi - lo) / n as f64;
    let refine = |mut a: f64, mut b: f64| {
        // Invariant: membership differs between a and b.
        let ma = member(a);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if member(m) == ma {
                a = m;
            } else {
                b = m;
            }
        }
        if ma {
            a
        } else {
            b
        }
    };
    let mut prev = lo;
    let mut prev_in = member(lo);
    if prev_in {
        start = Some(lo);
    }
    for i in 1..=n {
        let y = lo + i as f64 * step;
        let now_in = member(y);
        if now_in != prev_in {
            let b = refine(prev, y);
            if now_in {
                start = Some(b);
            } else if let Some(s) = start.take() {
                pieces.push((s, b));
            }
        }
        prev = y;
        prev_in = now_in;
    }
    if let Some(s) = start {
        pieces.push((s, hi));
    }
    Ok(RealSet1D::from_intervals(
        pieces
            .into_iter()
            .map(|(a, b)| crate::convexsets::Interval {
                lo: a,
                hi: b,
                lo_closed: member(a),
                hi_closed: member(b),
            })
            .collect(),
    ))
}

/// Verdict of an inner-semicontinuity probe of the sublevel map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum IscVerdict {
    /// No violation was found. Evidence, not proof: the probe samples
    /// finitely many sequences.
    NoViolation,
    /// A sublevel point `y` of the base level that no sampled point of
    /// `S_f(x_k) ∩ V` approximates within the matching radius.
    ViolationWitness { y: Vec<f64>, x_k: Vec<f64> },
}

/// Probe inner semicontinuity of `x -> S_f(x) ∩ V` at `x̄`: for sampled
/// sequences `x_k -> x̄` inside `dom f` and points `y ∈ S_f(x̄) ∩ V`, look
/// for a nearby member of `S_f(x_k) ∩ V`. The matching radius is graded,
/// `max(‖y - x̄‖, 2‖x_k - x̄‖) + tol`, so approach paths that sweep the
/// segment from `y` toward `x̄` count as convergent; a witness is reported
/// only when matching fails on the entire tail of a sequence, since inner
/// semicontinuity constrains only the limit. Only a
/// [`IscVerdict::ViolationWitness`] is conclusive.
pub fn sublevel_isc_probe(
    f: &FnModel,
    xbar: &[f64],
    v: &SetOracle,
    probe_grid: &[Vec<f64>],
) -> Result<IscVerdict, FnError> {
    if xbar.len() != f.dim {
        return Err(FnError::DimensionMismatch { expected: f.dim, got: xbar.len() });
    }
    let f_bar = f.eval_unchecked(xbar);
    if !f_bar.is_finite() {
        return Err(FnError::PointOutsideDomain);
    }
    let norm = |p: &[f64], q: &[f64]| -> f64 {
        p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    let ys: Vec<&Vec<f64>> = probe_grid
        .iter()
        .filter(|y| {
            y.len() == f.dim
                && f.eval_unchecked(y) <= f_bar + TOL_MEMBER
                && v.contains_unchecked(y)
        })
        .collect();
    let in_sublevel = |q: &[f64], level: f64| f.eval_unchecked(q) <= level + TOL_MEMBER;
    for p in probe_grid {
        if p.len() != f.dim || !f.eval_unchecked(p).is_finite() || norm(p, xbar) < TOL_MEMBER {
            continue;
        }
        // The tail of the sequence x_k = x̄ + 2^{-k}(p - x̄), k = 7..=12,
        // restricted to the effective domain.
        let tail: Vec<(Vec<f64>, f64)> = (7..=12u32)
            .filter_map(|k| {
                let s = 0.5f64.powi(k as i32);
                let xk: Vec<f64> =
                    xbar.iter().zip(p).map(|(c, pi)| c + s * (pi - c)).collect();
                let level = f.eval_unchecked(&xk);
                level.is_finite().then_some((xk, level))
            })
            .collect();
        if tail.is_empty() {
            continue;
        }
        for y in &ys {
            let unmatched = |xk: &Vec<f64>, level: f64| {
                let r = norm(y, xbar).max(2.0 * norm(xk, xbar)) + 1e-6;
                let matched = |q: &[f64]| {
                    norm(q, y) <= r && in_sublevel(q, level) && v.contains_unchecked(q)
                };
                // Candidates: y itself, x_k itself, the probe grid, and a
                // dense sample of the segment from y to x_k.
                !(matched(y)
                    || matched(xk)
                    || probe_grid.iter().any(|q| q.len() == f.dim && matched(q))
                    || (0..=64).any(|i| {
                        let t = i as f64 / 64.0;
                        let q: Vec<f64> =
                            y.iter().zip(xk).map(|(a, b)| a + t * (b - a)).collect();
                        matched(&q)
                    }))
            };
            if tail.iter().all(|(xk, level)| unmatched(xk, *level)) {
                let (xk, _) = tail.last().unwrap();
                return Ok(IscVerdict::ViolationWitness { y: (*y).clone(), x_k: xk.clone() });
            }
        }
    }
    Ok(IscVerdict::NoViolation)
}

// ----- catalog ------------------------------------------------------------

/// A catalog parameter: scalar, vector, or matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

pub type Params = BTreeMap<String, ParamValue>;

fn param_num(params: &Params, key: &str, default: Option<f64>) -> Result<f64, FnError> {
    match params.get(key) {
        Some(ParamValue::Num(v)) => Ok(*v),
        Some(_) => Err(FnError::InvalidParams(format!("parameter `{key}` must be a number"))),
        None => default
            .ok_or_else(|| FnError::InvalidParams(format!("missing required parameter `{key}`"))),
    }
}

fn param_vec(params: &Params, key: &str, dim: usize) -> Result<Vec<f64>, FnError> {
    match params.get(key) {
        Some(ParamValue::Vector(v)) if v.len() == dim => Ok(v.clone()),
        Some(ParamValue::Vector(v)) => Err(FnError::InvalidParams(format!(
            "parameter `{key}` must have length {dim}, got {}",
            v.len()
        ))),
        Some(_) => Err(FnError::InvalidParams(format!("parameter `{key}` must be a vector"))),
        None => Ok(vec![0.0; dim]),
    }
}

fn param_mat(params: &Params, key: &str) -> Result<Option<DMatrix<f64>>, FnError> {
    match params.get(key) {
        Some(ParamValue::Matrix(rows)) => {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(FnError::InvalidParams(format!(
                    "parameter `{key}` must be a nonempty square matrix"
                )));
            }
            Ok(Some(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
        }
        Some(_) => Err(FnError::InvalidParams(format!("parameter `{key}` must be a matrix"))),
        None => Ok(None),
    }
}

/// Ids accepted by [`catalog_instantiate`].
pub const CATALOG_IDS: &[&str] = &[
    "zero",
    "linear",
    "square",
    "half_square",
    "neg_square",
    "abs",
    "sqrt_abs",
    "x_over_one_plus_abs",
    "ex_3_1_g1",
    "ex_3_1_g2",
    "ex_4_1_g1",
    "ex_4_1_g2",
    "rem_4_1_g",
    "ex_5_3_g",
    "isc_jump",
    "qfp",
];

fn set_neg_half_ray() -> RealSet1D {
    RealSet1D::interval(f64::NEG_INFINITY, -0.5, false, true)
}

/// Instantiate a built-in function by id.
///
/// 1-D catalog (params ignored unless noted):
/// - `zero` (param `dim`, default 1): the constant 0.
/// - `linear` (param `a`, default 1): `x -> a x`.
/// - `square`, `half_square`, `neg_square`, `abs`, `sqrt_abs`,
///   `x_over_one_plus_abs`: the eponymous scalar functions.
/// - `ex_3_1_g1` / `ex_3_1_g2`: the half-parabola pair `0 ∨ x²/2` glued at
///   0 (flat on the right / flat on the left respectively).
/// - `ex_4_1_g1`: `0` at 0, `-1/x` on `(0,1]`, `+inf` elsewhere.
/// - `ex_4_1_g2`: `0` at 0, `+inf` on `(0,1]`, `-1/x` elsewhere.
/// - `rem_4_1_g`: `max(0, -x)`.
/// - `ex_5_3_g`: `2x` for `x>0`, `0` at 0, `-x-1` for `x<0`.
/// - `isc_jump`: `min(x, 0)`; its sublevel map fails inner
///   semicontinuity at 0.
/// - `qfp` (params `A` required, `B`, `a`, `b`, `alpha`, `beta`, `m`,
///   `M`): the quadratic quotient
///   `(x'Ax/2 + a'x + alpha) / (x'Bx/2 + b'x + beta)` with `A` positive
///   definite, `+inf` where the denominator is nonpositive.
pub fn catalog_instantiate(id: &str, params: &Params) -> Result<FnModel, FnError> {
    let smooth = Annotations {
        lsc: Some(true),
        usc: Some(true),
        continuous: Some(true),
        locally_lipschitz: Some(true),
        ..Annotations::default()
    };
    let mut f = match id {
        "zero" => {
            let dim = param_num(params, "dim", Some(1.0))?;
            if dim < 1.0 || dim.fract() != 0.0 || dim > 64.0 {
                return Err(FnError::InvalidParams("dim must be an integer in 1..=64".into()));
            }
            let dim = dim as usize;
            FnModel::new(dim, SetOracle::whole_space(dim), |_| 0.0).with_annotations(Annotations {
                convex: Some(true),
                quasiconvex: Some(true),
                sublevel_isc: Some(true),
                ..smooth
            })
        }
        "linear" => {
            let a = param_num(params, "a", Some(1.0))?;
            FnModel::scalar(RealSet1D::all(), move |x| a * x).with_annotations(Annotations {
                convex: Some(true),
                quasiconvex: Some(true),
                sublevel_isc: Some(true),
                ..smooth
            })
        }
        "square" => FnModel::scalar(RealSet1D::all(), |x| x * x).with_annotations(Annotations {
            convex: Some(true),
            quasiconvex: Some(true),
            strongly_convex_gamma: Some(2.0),
            sq_modulus: Some(2.0),
            strongly_pseudoconvex_alpha: Some(1.0),
            sublevel_isc: Some(true),
            ..smooth
        }),
        "half_square" => {
            FnModel::scalar(RealSet1D::all(), |x| 0.5 * x * x).with_annotations(Annotations {
                convex: Some(true),
                quasiconvex: Some(true),
                strongly_convex_gamma: Some(1.0),
                sq_modulus: Some(1.0),
                strongly_pseudoconvex_alpha: Some(0.5),
                sublevel_isc: Some(true),
                ..smooth
            })
        }
        "neg_square" => {
            FnModel::scalar(RealSet1D::all(), |x| -x * x).with_annotations(Annotations {
                convex: Some(false),
                quasiconvex: Some(false),
                ..smooth
            })
        }
        "abs" => FnModel::scalar(RealSet1D::all(), f64::abs).with_annotations(Annotations {
            convex: Some(true),
            quasiconvex: Some(true),
            sublevel_isc: Some(true),
            ..smooth
        }),
        "sqrt_abs" => {
            FnModel::scalar(RealSet1D::all(), |x| x.abs().sqrt()).with_annotations(Annotations {
                convex: Some(false),
                quasiconvex: Some(true),
                // Strongly quasiconvex on bounded sets; modulus 1/2 is
                // valid on [-1, 1].
                sq_modulus: Some(0.5),
                sq_region_1d: Some(RealSet1D::closed(-1.0, 1.0)),
                known_strong_subdiffs: vec![KnownSubdiff {
                    x: 0.0,
                    beta: 1.0,
                    gamma: 0.5,
                    k: RealSet1D::closed(-1.0, 1.0),
                    value: RealSet1D::closed(-1.5, 1.5),
                }],
                ..smooth
            })
        }
        "x_over_one_plus_abs" => FnModel::scalar(RealSet1D::all(), |x| x / (1.0 + x.abs()))
            .with_annotations(Annotations {
                convex: Some(false),
                // Strictly quasiconvex, but not strongly so on R.
                quasiconvex: Some(true),
                sq_modulus: None,
                ..smooth
            }),
        "ex_3_1_g1" => FnModel::scalar(
            RealSet1D::all(),
            |x| if x >= 0.0 { 0.0 } else { 0.5 * x * x },
        )
        .with_annotations(Annotations {
            convex: Some(true),
            quasiconvex: Some(true),
            known_strong_subdiffs: vec![KnownSubdiff {
                x: 0.0,
                beta: 1.0,
                gamma: 1.0,
                k: RealSet1D::all(),
                value: RealSet1D::empty(),
            }],
            ..smooth
        }),
        "ex_3_1_g2" => FnModel::scalar(
            RealSet1D::all(),
            |x| if x >= 0.0 { 0.5 * x * x } else { 0.0 },
        )
        .with_annotations(Annotations {
            convex: Some(true),
            quasiconvex: Some(true),
            known_strong_subdiffs: vec![KnownSubdiff {
                x: 0.0,
                beta: 1.0,
                gamma: 1.0,
                k: RealSet1D::all(),
                value: RealSet1D::empty(),
            }],
            ..smooth
        }),
        "ex_4_1_g1" => FnModel::scalar(RealSet1D::closed(0.0, 1.0), |x| {
            if x == 0.0 {
                0.0
            } else {
                -1.0 / x
            }
        })
        .with_annotations(Annotations {
            lsc: Some(false),
            usc: Some(false),
            continuous: Some(false),
            locally_lipschitz: Some(false),
            quasiconvex: Some(true),
            known_strong_subdiffs: vec![KnownSubdiff {
                x: 0.0,
                beta: 1.0,
                gamma: 1.0,
                k: RealSet1D::all(),
                value: set_neg_half_ray(),
            }],
            ..Annotations::default()
        }),
        "ex_4_1_g2" => {
            let dom = RealSet1D::singleton(0.0)
                .union(&RealSet1D::interval(1.0, f64::INFINITY, false, false))
                .union(&RealSet1D::interval(f64::NEG_INFINITY, 0.0, false, false));
            FnModel::scalar(dom, |x| if x == 0.0 { 0.0 } else { -1.0 / x }).with_annotations(
                Annotations {
                    lsc: Some(false),
                    usc: Some(false),
                    continuous: Some(false),
                    locally_lipschitz: Some(false),
                    known_strong_subdiffs: vec![KnownSubdiff {
                        x: 0.0,
                        beta: 1.0,
                        gamma: 1.0,
                        k: RealSet1D::all(),
                        value: RealSet1D::empty(),
                    }],
                    ..Annotations::default()
                },
            )
        }
        "rem_4_1_g" => FnModel::scalar(RealSet1D::all(), |x| (-x).max(0.0)).with_annotations(
            Annotations {
                convex: Some(true),
                quasiconvex: Some(true),
                sublevel_isc: Some(true),
                known_strong_subdiffs: vec![
                    KnownSubdiff {
                        x: 0.0,
                        beta: 1.0,
                        gamma: 1.0,
                        k: RealSet1D::closed(-1.0, 0.0),
                        value: RealSet1D::interval(-1.0, f64::INFINITY, true, false),
                    },
                    KnownSubdiff {
                        x: 0.0,
                        beta: 1.0,
                        gamma: 1.0,
                        k: RealSet1D::closed(0.0, 1.0),
                        value: set_neg_half_ray(),
                    },
                ],
                ..smooth
            },
        ),
        "ex_5_3_g" => FnModel::scalar(RealSet1D::all(), |x| {
            if x > 0.0 {
                2.0 * x
            } else if x == 0.0 {
                0.0
            } else {
                -x - 1.0
            }
        })
        .with_annotations(Annotations {
            lsc: Some(false),
            usc: Some(true),
            continuous: Some(false),
            locally_lipschitz: Some(false),
            quasiconvex: Some(true),
            known_strong_subdiffs: vec![
                KnownSubdiff {
                    x: 0.0,
                    beta: 1.0,
                    gamma: 1.0,
                    k: RealSet1D::closed(-1.0, 0.0),
                    value: RealSet1D::interval(0.5, f64::INFINITY, true, false),
                },
                KnownSubdiff {
                    x: 0.0,
                    beta: 1.0,
                    gamma: 1.0,
                    k: RealSet1D::closed(-1.0, 1.0),
                    value: RealSet1D::closed(0.5, 2.0),
                },
            ],
            ..Annotations::default()
        }),
        "isc_jump" => FnModel::scalar(RealSet1D::all(), |x| x.min(0.0)).with_annotations(
            Annotations {
                convex: Some(false),
                quasiconvex: Some(true),
                sublevel_isc: Some(false),
                ..smooth
            },
        ),
        "qfp" => build_qfp(params)?,
        other => return Err(FnError::UnknownCatalogId(other.to_string())),
    };
    f.id = Some(id.to_string());
    Ok(f)
}

/// Build the quadratic-quotient model `h = f/g` with
/// `f(x) = x'Ax/2 + a'x + alpha` and `g(x) = x'Bx/2 + b'x + beta`;
/// `h = +inf` where `g <= 0`. Requires `A` symmetric positive definite
/// and `0 < m <= M`. When `B = 0`, the model is strongly quasiconvex on
/// `K = {m <= g <= M}` with modulus `λ_min(A) / M`, recorded in the
/// annotations.
fn build_qfp(params: &Params) -> Result<FnModel, FnError> {
    let a_mat = param_mat(params, "A")?
        .ok_or_else(|| FnError::InvalidParams("missing required parameter `A`".into()))?;
    let dim = a_mat.nrows();
    if (&a_mat - a_mat.transpose()).abs().max() > 1e-12 {
        return Err(FnError::InvalidParams("A must be symmetric".into()));
    }
    let lambda_min = a_mat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lambda_min <= 0.0 {
        return Err(FnError::InvalidParams("A must be positive definite".into()));
    }
    let b_mat = param_mat(params, "B")?.unwrap_or_else(|| DMatrix::zeros(dim, dim));
    if b_mat.nrows() != dim {
        return Err(FnError::InvalidParams("B must have the same size as A".into()));
    }
    let a_lin = DVector::from_vec(param_vec(params, "a", dim)?);
    let b_lin = DVector::from_vec(param_vec(params, "b", dim)?);
    let alpha = param_num(params, "alpha", Some(0.0))?;
    let beta = param_num(params, "beta", Some(1.0))?;
    let m = param_num(params, "m", Some(1.0))?;
    let m_cap = param_num(params, "M", Some(1.0))?;
    if !(0.0 < m && m <= m_cap) {
        return Err(FnError::InvalidParams("need 0 < m <= M".into()));
    }
    let b_is_zero = b_mat.abs().max() == 0.0;
    let denom = {
        let b_mat = b_mat.clone();
        let b_lin = b_lin.clone();
        move |x: &[f64]| -> f64 {
            let xv = DVector::from_column_slice(x);
            0.5 * (&b_mat * &xv).dot(&xv) + b_lin.dot(&xv) + beta
        }
    };
    let numer = move |x: &[f64]| -> f64 {
        let xv = DVector::from_column_slice(x);
        0.5 * (&a_mat * &xv).dot(&xv) + a_lin.dot(&xv) + alpha
    };
    let dom_denom = denom.clone();
    let domain = SetOracle::from_fn(dim, b_is_zero, move |x: &[f64]| dom_denom(x) > 0.0);
    let eval_denom = denom.clone();
    let mut f = FnModel::new(dim, domain, move |x: &[f64]| {
        let g = eval_denom(x);
        if g > 0.0 {
            numer(x) / g
        } else {
            f64::INFINITY
        }
    });
    f.annotations = Annotations {
        continuous: Some(true),
        locally_lipschitz: Some(true),
        lsc: Some(true),
        usc: Some(true),
        quasiconvex: if b_is_zero { Some(true) } else { None },
        sq_modulus: if b_is_zero { Some(lambda_min / m_cap) } else { None },
        sq_region_1d: if dim == 1 {
            // K = {m <= g <= M} for affine g(x) = b x + beta.
            let b0 = b_lin[0];
            if b0 != 0.0 {
                let (lo, hi) = ((m - beta) / b0, (m_cap - beta) / b0);
                Some(RealSet1D::closed(lo.min(hi), lo.max(hi)))
            } else if m <= beta && beta <= m_cap {
                Some(RealSet1D::all())
            } else {
                Some(RealSet1D::empty())
            }
        } else {
            None
        },
        ..Annotations::default()
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn get(id: &str) -> FnModel {
        catalog_instantiate(id, &Params::new()).unwrap()
    }

    #[test]
    fn schedule_is_descending_and_valid() {
        let s = LimitSchedule::default();
        assert!(s.is_valid());
        let ts: Vec<f64> = s.steps_iter().collect();
        assert_eq!(ts.len(), 30);
        assert!(ts.windows(2).all(|w| w[1] < w[0]));
        assert_relative_eq!(ts[0], 1e-2);
    }

    #[test]
    fn eval_matches_piecewise_definitions() {
        let g1 = get("ex_4_1_g1");
        assert_eq!(eval_extended(&g1, &[0.5]).unwrap(), -2.0);
        assert_eq!(eval_extended(&g1, &[2.0]).unwrap(), f64::INFINITY);
        assert_eq!(eval_extended(&g1, &[0.0]).unwrap(), 0.0);
        assert_eq!(eval_extended(&g1, &[-0.1]).unwrap(), f64::INFINITY);

        let g2 = get("ex_4_1_g2");
        assert_eq!(eval_extended(&g2, &[0.0]).unwrap(), 0.0);
        assert_eq!(eval_extended(&g2, &[0.5]).unwrap(), f64::INFINITY);
        assert_eq!(eval_extended(&g2, &[2.0]).unwrap(), -0.5);
        assert_eq!(eval_extended(&g2, &[-2.0]).unwrap(), 0.5);

        let z = catalog_instantiate(
            "zero",
            &Params::from([("dim".to_string(), ParamValue::Num(3.0))]),
        )
        .unwrap();
        assert_eq!(eval_extended(&z, &[1.0, -2.0, 7.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_agrees_with_closed_forms_on_dense_grid() {
        // Independent re-statements of the piecewise formulas; equality
        // must be exact.
        let cases: Vec<(&str, Box<dyn Fn(f64) -> f64>)> = vec![
            ("rem_4_1_g", Box::new(|x| if x >= 0.0 { 0.0 } else { -x })),
            (
                "ex_5_3_g",
                Box::new(|x| {
                    if x > 0.0 {
                        2.0 * x
                    } else if x < 0.0 {
                        -x - 1.0
                    } else {
                        0.0
                    }
                }),
            ),
            ("ex_3_1_g1", Box::new(|x| if x < 0.0 { 0.5 * x * x } else { 0.0 })),
            ("ex_3_1_g2", Box::new(|x| if x > 0.0 { 0.5 * x * x } else { 0.0 })),
            ("sqrt_abs", Box::new(|x| x.abs().sqrt())),
            ("x_over_one_plus_abs", Box::new(|x| x / (1.0 + x.abs()))),
            ("isc_jump", Box::new(|x| if x < 0.0 { x } else { 0.0 })),
        ];
        for (id, oracle) in cases {
            let f = get(id);
            for i in -400..=400 {
                let x = i as f64 / 100.0;
                assert_eq!(eval_extended(&f, &[x]).unwrap(), oracle(x), "{id} at {x}");
            }
        }
    }

    #[test]
    fn dini_examples() {
        let sched = LimitSchedule::default();
        let g = get("rem_4_1_g");
        assert_relative_eq!(dini_upper(&g, &[0.0], &[-1.0], &sched).unwrap(), 1.0);
        assert_relative_eq!(dini_upper(&g, &[0.0], &[1.0], &sched).unwrap(), 0.0);

        let z = get("zero");
        assert_eq!(dini_upper(&z, &[3.0], &[-2.0], &sched).unwrap(), 0.0);

        // Analytic oracle: d/dt (1 + t)^2 at 0 is 2.
        let sq = get("square");
        assert_relative_eq!(
            dini_upper(&sq, &[1.0], &[1.0], &sched).unwrap(),
            2.0,
            // Difference quotients at t ~ 1e-11 carry ~1e-5 of float
            // cancellation noise.
            epsilon = 1e-4
        );
    }

    #[test]
    fn dini_reports_divergence_as_infinity() {
        let g1 = get("ex_4_1_g1");
        // Leaving the domain leftwards: quotients are +inf.
        assert_eq!(dini_upper(&g1, &[0.0], &[-1.0], &LimitSchedule::default()).unwrap(),
            f64::INFINITY);
    }

    #[test]
    fn hadamard_examples() {
        let sched = LimitSchedule::default();
        let g = get("rem_4_1_g");
        let h_plus = hadamard_upper(&g, &[0.0], &[1.0], &sched).unwrap();
        assert!(h_plus.abs() <= 1e-6, "expected ~0, got {h_plus}");
        assert_relative_eq!(
            hadamard_upper(&g, &[0.0], &[-1.0], &sched).unwrap(),
            1.0,
            epsilon = 1e-6
        );

        let z = get("zero");
        assert_eq!(hadamard_upper(&z, &[0.0], &[5.0], &sched).unwrap(), 0.0);

        // |x| at 0 in direction 0: nonnegative, vanishing with the jitter.
        let a = get("abs");
        let v = hadamard_upper(&a, &[0.0], &[0.0], &sched).unwrap();
        assert!(v >= 0.0 && v <= 1e-6, "got {v}");
        let tight = LimitSchedule { direction_jitter: 1e-3, ..sched };
        assert!(hadamard_upper(&a, &[0.0], &[0.0], &tight).unwrap() <= v + 1e-15);
    }

    #[test]
    fn hadamard_dominates_dini_on_catalog() {
        let sched = LimitSchedule::default();
        for id in CATALOG_IDS {
            if *id == "qfp" || *id == "zero" {
                continue;
            }
            let f = get(id);
            for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                if !eval_extended(&f, &[x]).unwrap().is_finite() {
                    continue;
                }
                for d in [-1.0, -0.3, 0.3, 1.0] {
                    let di = dini_upper(&f, &[x], &[d], &sched).unwrap();
                    let ha = hadamard_upper(&f, &[x], &[d], &sched).unwrap();
                    assert!(ha >= di, "{id} at {x} dir {d}: hadamard {ha} < dini {di}");
                }
            }
        }
    }

    #[test]
    fn sublevel_set_examples() {
        let g1 = get("ex_4_1_g1");
        let s = sublevel_set(&g1, &[0.0], false).unwrap();
        for i in -300..=300 {
            let y = i as f64 / 100.0;
            let expect = (0.0..=1.0).contains(&y);
            assert_eq!(s.contains_unchecked(&[y]), expect, "at {y}");
        }

        // Strict sublevel at a global minimizer is empty.
        let sq = get("square");
        let strict = sublevel_set(&sq, &[0.0], true).unwrap();
        for i in -300..=300 {
            assert!(!strict.contains_unchecked(&[i as f64 / 100.0]));
        }

        let s1 = sublevel_set(&sq, &[1.0], false).unwrap();
        for i in -300..=300 {
            let y = i as f64 / 100.0;
            assert_eq!(s1.contains_unchecked(&[y]), (-1.0..=1.0).contains(&y), "at {y}");
        }
        // Contains the base point; strict variant does not.
        assert!(s1.contains_unchecked(&[1.0]));
        assert!(!sublevel_set(&sq, &[1.0], true).unwrap().contains_unchecked(&[1.0]));
    }

    #[test]
    fn sublevel_interval_refines_boundaries() {
        let sq = get("square");
        let s = sublevel_interval_1d(&sq, 1.0, false, -3.0, 3.0, 400).unwrap();
        assert!(s.approx_eq(&RealSet1D::closed(-1.0, 1.0), 1e-9));

        let g53 = get("ex_5_3_g");
        // g <= 0 on [-1, 0]: left branch -x-1 <= 0 iff x >= -1.
        let s = sublevel_interval_1d(&g53, 0.0, false, -3.0, 3.0, 400).unwrap();
        assert!(s.approx_eq(&RealSet1D::closed(-1.0, 0.0), 1e-9));
    }

    fn grid_1d(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
        (0..=n).map(|i| vec![lo + (hi - lo) * i as f64 / n as f64]).collect()
    }

    #[test]
    fn isc_probe_accepts_shrinking_but_sweeping_sublevels() {
        let g = get("ex_4_1_g1");
        let v = SetOracle::whole_space(1);
        let verdict = sublevel_isc_probe(&g, &[0.0], &v, &grid_1d(-2.0, 2.0, 80)).unwrap();
        assert_eq!(verdict, IscVerdict::NoViolation);
    }

    #[test]
    fn isc_probe_accepts_constant_functions() {
        let z = get("zero");
        let v = SetOracle::whole_space(1);
        let verdict = sublevel_isc_probe(&z, &[0.0], &v, &grid_1d(-2.0, 2.0, 40)).unwrap();
        assert_eq!(verdict, IscVerdict::NoViolation);
    }

    #[test]
    fn isc_probe_flags_jumping_sublevel_map() {
        let g = get("isc_jump");
        let v = SetOracle::whole_space(1);
        match sublevel_isc_probe(&g, &[0.0], &v, &grid_1d(-2.0, 2.0, 80)).unwrap() {
            IscVerdict::ViolationWitness { y, x_k } => {
                // The witness level point sits strictly right of 0 while
                // the sequence approaches from the left.
                assert!(y[0] > 0.0, "y = {}", y[0]);
                assert!(x_k[0] < 0.0, "x_k = {}", x_k[0]);
            }
            IscVerdict::NoViolation => panic!("expected a violation witness"),
        }
    }

    #[test]
    fn qfp_reduces_to_half_square_for_identity_data() {
        let params = Params::from([(
            "A".to_string(),
            ParamValue::Matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        )]);
        let h = catalog_instantiate("qfp", &params).unwrap();
        assert_eq!(h.dim, 2);
        // h(x) = ||x||^2 / 2 with denominator 1; modulus lambda_min/M = 1.
        assert_relative_eq!(eval_extended(&h, &[3.0, 4.0]).unwrap(), 12.5);
        assert_eq!(h.annotations.sq_modulus, Some(1.0));
    }

    #[test]
    fn qfp_rejects_bad_data() {
        let err = catalog_instantiate(
            "qfp",
            &Params::from([(
                "A".to_string(),
                ParamValue::Matrix(vec![vec![1.0, 0.0], vec![0.0, -1.0]]),
            )]),
        );
        assert!(matches!(err, Err(FnError::InvalidParams(_))));
        assert!(matches!(
            catalog_instantiate("qfp", &Params::new()),
            Err(FnError::InvalidParams(_))
        ));
        assert!(matches!(
            catalog_instantiate("no_such_fn", &Params::new()),
            Err(FnError::UnknownCatalogId(_))
        ));
    }

    #[test]
    fn base_point_outside_domain_is_an_error() {
        let g1 = get("ex_4_1_g1");
        assert!(matches!(
            dini_upper(&g1, &[2.0], &[1.0], &LimitSchedule::default()),
            Err(FnError::PointOutsideDomain)
        ));
        assert!(matches!(sublevel_set(&g1, &[2.0], false), Err(FnError::PointOutsideDomain)));
    }
}
