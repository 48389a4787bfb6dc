//! Exact 1-D set algebra and general-dimension cone/polarity predicates.
//!
//! [`RealSet1D`] is a normalized finite union of intervals with
//! extended-real endpoints and open/closed flags; all quantitative 1-D
//! answers in the library are represented exactly in this form and
//! serialize to canonical interval notation such as `(-inf,-0.5]`.
//!
//! [`SetOracle`] describes a set in any dimension by a membership
//! predicate plus optional structural data (generators, halfspaces, an
//! exact interval description when 1-D). Predicates against oracles
//! (polar membership, tangency) are verdicts over a supplied sample grid
//! and are reported as such.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcspace::LimitSchedule;
use crate::TOL_MEMBER;

/// Errors from set operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("point {0} is not in the set")]
    PointNotInSet(f64),
    #[error("empty sample grid")]
    EmptyGrid,
    #[error("empty input point list")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse interval notation: {0}")]
    Parse(String),
}

/// One interval of a [`RealSet1D`]. Infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn is_valid(&self) -> bool {
        if self.lo.is_nan() || self.hi.is_nan() {
            return false;
        }
        if self.lo > self.hi {
            return false;
        }
        if self.lo == self.hi {
            // Only the closed singleton [a,a] is non-empty.
            return self.lo_closed && self.hi_closed && self.lo.is_finite();
        }
        true
    }
}

/// A finite union of pairwise disjoint, sorted intervals; may be empty.
///
/// The representation is kept normalized: overlapping or touching
/// intervals are merged, empty intervals dropped, and infinite endpoints
/// forced open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealSet1D {
    intervals: Vec<Interval>,
}

impl RealSet1D {
    // ----- constructors ---------------------------------------------------

    pub fn empty() -> Self {
        RealSet1D { intervals: vec![] }
    }

    /// The whole real line.
    pub fn all() -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY, false, false)
    }

    pub fn singleton(a: f64) -> Self {
        Self::interval(a, a, true, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::interval(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::interval(lo, hi, false, false)
    }

    /// `[0, +inf)`.
    pub fn nonneg() -> Self {
        Self::interval(0.0, f64::INFINITY, true, false)
    }

    /// `(-inf, 0]`.
    pub fn nonpos() -> Self {
        Self::interval(f64::NEG_INFINITY, 0.0, false, true)
    }

    pub fn interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self::from_intervals(vec![Interval { lo, hi, lo_closed, hi_closed }])
    }

    /// Build from raw intervals, normalizing (sort, merge, drop empties).
    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        let mut cleaned: Vec<Interval> = intervals
            .into_iter()
            .map(|mut iv| {
                if iv.lo == f64::NEG_INFINITY {
                    iv.lo_closed = false;
                }
                if iv.hi == f64::INFINITY {
                    iv.hi_closed = false;
                }
                iv
            })
            .filter(Interval::is_valid)
            .collect();
        cleaned.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap()
                .then(a.hi.partial_cmp(&b.hi).unwrap())
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(cleaned.len());
        for iv in cleaned {
            match merged.last_mut() {
                Some(last) if overlaps_or_touches(last, &iv) => {
                    if iv.lo < last.lo || (iv.lo == last.lo && iv.lo_closed) {
                        last.lo = iv.lo.min(last.lo);
                        last.lo_closed = last.lo_closed || iv.lo_closed;
                    }
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    } else if iv.hi == last.hi {
                        last.hi_closed = last.hi_closed || iv.hi_closed;
                    }
                }
                _ => merged.push(iv),
            }
        }
        RealSet1D { intervals: merged }
    }

    // ----- basic queries --------------------------------------------------

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Infimum; `+inf` for the empty set.
    pub fn inf(&self) -> f64 {
        self.intervals.first().map_or(f64::INFINITY, |iv| iv.lo)
    }

    /// Supremum; `-inf` for the empty set.
    pub fn sup(&self) -> f64 {
        self.intervals.last().map_or(f64::NEG_INFINITY, |iv| iv.hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.inf() > f64::NEG_INFINITY && self.sup() < f64::INFINITY
    }

    /// True iff the set equals `{0}`.
    pub fn is_zero_singleton(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].lo == 0.0
            && self.intervals[0].hi == 0.0
    }

    // ----- set algebra ----------------------------------------------------

    pub fn union(&self, other: &RealSet1D) -> RealSet1D {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        RealSet1D::from_intervals(all)
    }

    pub fn intersect(&self, other: &RealSet1D) -> RealSet1D {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if lo > hi {
                    continue;
                }
                let lo_closed = if a.lo == b.lo {
                    a.lo_closed && b.lo_closed
                } else if lo == a.lo {
                    a.lo_closed
                } else {
                    b.lo_closed
                };
                let hi_closed = if a.hi == b.hi {
                    a.hi_closed && b.hi_closed
                } else if hi == a.hi {
                    a.hi_closed
                } else {
                    b.hi_closed
                };
                out.push(Interval { lo, hi, lo_closed, hi_closed });
            }
        }
        RealSet1D::from_intervals(out)
    }

    /// Minkowski sum. The convention `A + emptyset = emptyset` falls out of
    /// the definition (no pair of summands exists).
    pub fn minkowski_sum(&self, other: &RealSet1D) -> RealSet1D {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                out.push(Interval {
                    lo: ext_add(a.lo, b.lo, f64::NEG_INFINITY),
                    hi: ext_add(a.hi, b.hi, f64::INFINITY),
                    lo_closed: a.lo_closed && b.lo_closed,
                    hi_closed: a.hi_closed && b.hi_closed,
                });
            }
        }
        RealSet1D::from_intervals(out)
    }

    pub fn translate(&self, c: f64) -> RealSet1D {
        self.minkowski_sum(&RealSet1D::singleton(c))
    }

    /// Pointwise scaling `{c * s : s in S}`.
    pub fn scale(&self, c: f64) -> RealSet1D {
        if c == 0.0 {
            return if self.is_empty() { Self::empty() } else { Self::singleton(0.0) };
        }
        let out = self
            .intervals
            .iter()
            .map(|iv| {
                let (a, b) = (c * iv.lo, c * iv.hi);
                if c > 0.0 {
                    Interval { lo: a, hi: b, lo_closed: iv.lo_closed, hi_closed: iv.hi_closed }
                } else {
                    Interval { lo: b, hi: a, lo_closed: iv.hi_closed, hi_closed: iv.lo_closed }
                }
            })
            .collect();
        RealSet1D::from_intervals(out)
    }

    /// `union over mu > 0 of mu * S` — the positive-scalar orbit used by
    /// positively homogeneous cone assemblies. Not closed in general
    /// (e.g. `[1,2]` maps to `(0, +inf)`).
    pub fn pos_scalar_orbit(&self) -> RealSet1D {
        let mut out = RealSet1D::empty();
        for iv in &self.intervals {
            let piece = if iv.lo > 0.0 {
                RealSet1D::interval(0.0, f64::INFINITY, false, false)
            } else if iv.hi < 0.0 {
                RealSet1D::interval(f64::NEG_INFINITY, 0.0, false, false)
            } else if iv.lo < 0.0 && iv.hi > 0.0 {
                RealSet1D::all()
            } else if iv.lo == 0.0 && iv.hi == 0.0 {
                RealSet1D::singleton(0.0)
            } else if iv.lo == 0.0 {
                // [0, b] or (0, b): orbit is [0,inf) or (0,inf).
                RealSet1D::interval(0.0, f64::INFINITY, iv.lo_closed, false)
            } else {
                RealSet1D::interval(f64::NEG_INFINITY, 0.0, false, iv.hi_closed)
            };
            out = out.union(&piece);
        }
        out
    }

    /// The cone generated by the set: `{0} ∪ pos_scalar_orbit`, with
    /// `cone(emptyset) = {0}` by the library-wide convention (flagged at
    /// call sites that depend on it).
    pub fn cone_hull(&self) -> RealSet1D {
        self.pos_scalar_orbit().union(&RealSet1D::singleton(0.0))
    }

    /// Topological closure.
    pub fn closure(&self) -> RealSet1D {
        RealSet1D::from_intervals(
            self.intervals
                .iter()
                .map(|iv| Interval {
                    lo: iv.lo,
                    hi: iv.hi,
                    lo_closed: iv.lo.is_finite(),
                    hi_closed: iv.hi.is_finite(),
                })
                .collect(),
        )
    }

    /// Convex hull (smallest interval containing the set).
    pub fn convex_hull(&self) -> RealSet1D {
        if self.is_empty() {
            return Self::empty();
        }
        let first = self.intervals.first().unwrap();
        let last = self.intervals.last().unwrap();
        RealSet1D::interval(first.lo, last.hi, first.lo_closed, last.hi_closed)
    }

    /// `sigma(S; d) = sup {s*d : s in S}`; `-inf` for the empty set.
    pub fn support_value(&self, d: f64) -> f64 {
        if self.is_empty() {
            return f64::NEG_INFINITY;
        }
        if d > 0.0 {
            let s = self.sup();
            if s.is_finite() { d * s } else { f64::INFINITY }
        } else if d < 0.0 {
            let i = self.inf();
            if i.is_finite() { d * i } else { f64::INFINITY }
        } else {
            0.0
        }
    }

    /// Distance from `x` to the set (`+inf` for the empty set).
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| {
                if iv.contains(x) || (iv.lo <= x && x <= iv.hi) {
                    0.0
                } else if x < iv.lo {
                    iv.lo - x
                } else {
                    x - iv.hi
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Normal cone of a closed 1-D set at a point of the set: `{0}` at an
    /// interior point, a half-line at a finite endpoint, the whole line at
    /// an isolated singleton.
    pub fn normal_cone_at(&self, x: f64) -> Result<RealSet1D, SetError> {
        let iv = self
            .intervals
            .iter()
            .find(|iv| iv.contains(x))
            .ok_or(SetError::PointNotInSet(x))?;
        let at_left = x == iv.lo;
        let at_right = x == iv.hi;
        Ok(match (at_left, at_right) {
            (true, true) => RealSet1D::all(),
            (true, false) => RealSet1D::nonpos(),
            (false, true) => RealSet1D::nonneg(),
            (false, false) => RealSet1D::singleton(0.0),
        })
    }

    /// Horizon (recession) set: `{0}` for a nonempty bounded set, plus the
    /// unbounded rays; the empty set recedes to the empty set.
    pub fn horizon(&self) -> RealSet1D {
        if self.is_empty() {
            return RealSet1D::empty();
        }
        let mut out = RealSet1D::singleton(0.0);
        if self.sup() == f64::INFINITY {
            out = out.union(&RealSet1D::nonneg());
        }
        if self.inf() == f64::NEG_INFINITY {
            out = out.union(&RealSet1D::nonpos());
        }
        out
    }

    /// Polar of the shifted set `(S - x)°`: all `v` with `v*(s-x) <= 0`
    /// for every `s` in `S`. Polar of the empty set is the whole line.
    pub fn polar_at(&self, x: f64) -> RealSet1D {
        if self.is_empty() {
            return RealSet1D::all();
        }
        let has_pos = self.sup() > x;
        let has_neg = self.inf() < x;
        match (has_pos, has_neg) {
            (true, true) => RealSet1D::singleton(0.0),
            (true, false) => RealSet1D::nonpos(),
            (false, true) => RealSet1D::nonneg(),
            (false, false) => RealSet1D::all(),
        }
    }

    // ----- approximate comparison ----------------------------------------

    /// Endpoint-wise distance between two interval unions: `+inf` when the
    /// component counts differ or one of a pair of corresponding endpoints
    /// is infinite and the other finite; otherwise the maximum absolute
    /// endpoint difference. Open/closed flags are ignored (grid
    /// reconstructions cannot distinguish them at tolerance scale).
    pub fn endpoint_distance(&self, other: &RealSet1D) -> f64 {
        if self.intervals.len() != other.intervals.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.intervals.iter().zip(other.intervals.iter()) {
            for (x, y) in [(a.lo, b.lo), (a.hi, b.hi)] {
                if x.is_infinite() || y.is_infinite() {
                    if x != y {
                        return f64::INFINITY;
                    }
                } else {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &RealSet1D, tol: f64) -> bool {
        self.endpoint_distance(other) <= tol
    }

    /// True iff every point of `self` lies in `other`, allowing endpoint
    /// slack `tol` (sampled exactly from the interval structure).
    pub fn subset_of(&self, other: &RealSet1D, tol: f64) -> bool {
        self.intervals.iter().all(|iv| {
            other.intervals.iter().any(|o| {
                iv.lo >= o.lo - tol && iv.hi <= o.hi + tol
            })
        })
    }
}

fn overlaps_or_touches(a: &Interval, b: &Interval) -> bool {
    // Called with a.lo <= b.lo after sorting.
    if b.lo < a.hi {
        return true;
    }
    b.lo == a.hi && (a.hi_closed || b.lo_closed)
}

fn ext_add(a: f64, b: f64, inf_sign: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        // Endpoint sums only mix infinities of the same sign within a
        // well-formed interval pair.
        inf_sign
    } else {
        a + b
    }
}

// ----- canonical interval notation ---------------------------------------

impl fmt::Display for RealSet1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|iv| {
                let lb = if iv.lo_closed { '[' } else { '(' };
                let rb = if iv.hi_closed { ']' } else { ')' };
                format!("{}{},{}{}", lb, fmt_endpoint(iv.lo), fmt_endpoint(iv.hi), rb)
            })
            .collect();
        write!(f, "{}", parts.join(" U "))
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        // `{}` on f64 round-trips exactly.
        format!("{}", x)
    }
}

impl FromStr for RealSet1D {
    type Err = SetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "{}" {
            return Ok(RealSet1D::empty());
        }
        let mut intervals = Vec::new();
        for part in s.split(" U ") {
            let part = part.trim();
            let bad = || SetError::Parse(part.to_string());
            let mut chars = part.chars();
            let first = chars.next().ok_or_else(bad)?;
            let last = part.chars().last().ok_or_else(bad)?;
            let lo_closed = match first {
                '[' => true,
                '(' => false,
                _ => return Err(bad()),
            };
            let hi_closed = match last {
                ']' => true,
                ')' => false,
                _ => return Err(bad()),
            };
            let inner = &part[1..part.len() - 1];
            let (lo_s, hi_s) = inner.split_once(',').ok_or_else(bad)?;
            let parse = |t: &str| -> Result<f64, SetError> {
                match t.trim() {
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    other => other.parse::<f64>().map_err(|_| bad()),
                }
            };
            intervals.push(Interval {
                lo: parse(lo_s)?,
                hi: parse(hi_s)?,
                lo_closed,
                hi_closed,
            });
        }
        Ok(RealSet1D::from_intervals(intervals))
    }
}

// ----- general-dimension set oracle ---------------------------------------

/// A set in `R^dim` given by a membership predicate plus optional
/// structural data. When `halfspaces` is present it is authoritative for
/// membership; when `dim == 1` an exact [`RealSet1D`] description may be
/// attached.
#[derive(Clone)]
pub struct SetOracle {
    pub dim: usize,
    contains: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
    pub generators: Option<Vec<Vec<f64>>>,
    /// Halfspaces `(n, c)` meaning `<n, x> <= c`.
    pub halfspaces: Option<Vec<(Vec<f64>, f64)>>,
    pub convex: bool,
    /// Exact description when `dim == 1`.
    pub interval: Option<RealSet1D>,
    /// Axis-aligned box `(lo, hi)` used for sampling when no better
    /// structure is available.
    pub box_hint: Option<(Vec<f64>, Vec<f64>)>,
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetOracle")
            .field("dim", &self.dim)
            .field("convex", &self.convex)
            .field("interval", &self.interval)
            .field("halfspaces", &self.halfspaces)
            .finish_non_exhaustive()
    }
}

impl SetOracle {
    /// Exact 1-D oracle backed by an interval union.
    pub fn from_interval(set: RealSet1D) -> Self {
        let s = set.clone();
        let convex = set.intervals().len() <= 1;
        SetOracle {
            dim: 1,
            contains: Arc::new(move |x: &[f64]| s.contains(x[0])),
            generators: None,
            halfspaces: None,
            convex,
            interval: Some(set),
            box_hint: None,
        }
    }

    /// The whole space `R^dim`.
    pub fn whole_space(dim: usize) -> Self {
        let mut o = SetOracle::from_fn(dim, true, |_| true);
        if dim == 1 {
            o.interval = Some(RealSet1D::all());
        }
        o
    }

    /// Closed Euclidean ball.
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        let dim = center.len();
        let c = center.clone();
        let lo: Vec<f64> = center.iter().map(|v| v - radius).collect();
        let hi: Vec<f64> = center.iter().map(|v| v + radius).collect();
        let mut o = SetOracle::from_fn(dim, true, move |x: &[f64]| {
            x.iter()
                .zip(&c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                <= radius + TOL_MEMBER
        });
        if dim == 1 {
            o.interval = Some(RealSet1D::closed(center[0] - radius, center[0] + radius));
        }
        o.box_hint = Some((lo, hi));
        o
    }

    /// Intersection of halfspaces `<n, x> <= c`; membership is evaluated
    /// exactly from the inequalities.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<(Vec<f64>, f64)>) -> Self {
        let hs = halfspaces.clone();
        SetOracle {
            dim,
            contains: Arc::new(move |x: &[f64]| {
                hs.iter().all(|(n, c)| {
                    n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= *c + TOL_MEMBER
                })
            }),
            generators: None,
            halfspaces: Some(halfspaces),
            convex: true,
            interval: None,
            box_hint: None,
        }
    }

    pub fn from_fn(
        dim: usize,
        convex: bool,
        contains: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        SetOracle {
            dim,
            contains: Arc::new(contains),
            generators: None,
            halfspaces: None,
            convex,
            interval: None,
            box_hint: None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, SetError> {
        if x.len() != self.dim {
            return Err(SetError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok((self.contains)(x))
    }

    /// Membership without the dimension check, for hot loops with
    /// pre-validated points.
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        (self.contains)(x)
    }
}

/// Verdict of a grid-sampled polar-cone membership test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PolarVerdict {
    /// Worst inner product `<v, y - x>` observed over the grid
    /// (nonpositive up to tolerance).
    Member { margin: f64 },
    /// A grid point violating the polar inequality.
    NonMember { witness: Vec<f64>, violation: f64 },
}

/// Check `v in (S - x)°` against the grid points of `S`.
pub fn polar_member(
    s: &SetOracle,
    x: &[f64],
    v: &[f64],
    grid: &[Vec<f64>],
) -> Result<PolarVerdict, SetError> {
    let mut worst = f64::NEG_INFINITY;
    let mut any = false;
    let mut bad: Option<(Vec<f64>, f64)> = None;
    for y in grid {
        if y.len() != s.dim || !s.contains_unchecked(y) {
            continue;
        }
        any = true;
        let ip: f64 = v.iter().zip(y.iter().zip(x)).map(|(vi, (yi, xi))| vi * (yi - xi)).sum();
        if ip > worst {
            worst = ip;
        }
        if ip > TOL_MEMBER && bad.is_none() {
            bad = Some((y.clone(), ip));
        }
    }
    if !any {
        return Err(SetError::EmptyGrid);
    }
    Ok(match bad {
        Some((witness, violation)) => PolarVerdict::NonMember { witness, violation },
        None => PolarVerdict::Member { margin: worst },
    })
}

/// Tangent-cone membership test at `x` in direction `d`, by searching the
/// schedule for feasible steps. For convex sets this is the feasible-
/// direction test `x + t d in S` for small `t`; otherwise jittered
/// directions `d'` with `||d' - d|| <= jitter * t` are also tried.
pub fn tangent_contains(s: &SetOracle, x: &[f64], d: &[f64], sched: &LimitSchedule) -> bool {
    if d.iter().all(|c| *c == 0.0) {
        return true;
    }
    let step_ok = |t: f64| -> bool {
        let probe: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
        if s.contains_unchecked(&probe) {
            return true;
        }
        if !s.convex && sched.direction_jitter > 0.0 {
            // Perturb each coordinate by up to jitter*t.
            let j = sched.direction_jitter * t;
            for k in 0..s.dim {
                for sign in [-1.0, 1.0] {
                    let mut p = probe.clone();
                    p[k] += sign * j * t;
                    if s.contains_unchecked(&p) {
                        return true;
                    }
                }
            }
        }
        false
    };
    if s.convex {
        // One feasible step suffices: D(X, z) = R+ (X - z).
        sched.steps_iter().any(step_ok)
    } else {
        // Demand feasibility along a tail of arbitrarily small steps.
        sched.steps_iter().rev().take(5).all(step_ok)
    }
}

// ----- minimum-norm point in a convex hull --------------------------------

/// Minimum-norm point of `conv(points)` via Wolfe's method (affine
/// minimization over a corral with away-step pruning). Returns the point
/// and its norm; accurate to well below 1e-9 on inputs of up to 1e4
/// points in low dimension.
pub fn min_norm_in_hull(points: &[Vec<f64>]) -> Result<(Vec<f64>, f64), SetError> {
    if points.is_empty() {
        return Err(SetError::EmptyInput);
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(SetError::DimensionMismatch { expected: dim, got: p.len() });
        }
    }
    let norm2 = |p: &[f64]| p.iter().map(|a| a * a).sum::<f64>();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    // Start from the point of smallest norm.
    let start = (0..points.len())
        .min_by(|&i, &j| norm2(&points[i]).partial_cmp(&norm2(&points[j])).unwrap())
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x: Vec<f64> = points[start].clone();
    let eps = 1e-12;

    for _ in 0..10_000 {
        // Major cycle: most-improving vertex.
        let xx = norm2(&x);
        let (best, best_ip) = (0..points.len())
            .map(|i| (i, dot(&x, &points[i])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if best_ip >= xx - eps * (1.0 + xx) {
            break; // optimality: <x, p> >= <x, x> for all p
        }
        if !corral.contains(&best) {
            corral.push(best);
            weights.push(0.0);
        }
        // Minor cycles: project onto the affine hull of the corral,
        // stepping back to the feasible boundary when weights go negative.
        loop {
            let u = affine_min_norm(points, &corral);
            if u.iter().all(|&w| w > -1e-14) {
                weights = u.iter().map(|w| w.max(0.0)).collect();
                break;
            }
            // Largest feasible step from `weights` toward `u`.
            let mut theta: f64 = 1.0;
            for (wi, ui) in weights.iter().zip(&u) {
                if *ui < 0.0 && wi - ui > 0.0 {
                    theta = theta.min(wi / (wi - ui));
                }
            }
            for (wi, ui) in weights.iter_mut().zip(&u) {
                *wi += theta * (*ui - *wi);
            }
            // Drop vanished vertices.
            let keep: Vec<usize> = (0..corral.len()).filter(|&k| weights[k] > 1e-14).collect();
            corral = keep.iter().map(|&k| corral[k]).collect();
            weights = keep.iter().map(|&k| weights[k]).collect();
            let tot: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= tot;
            }
        }
        x = vec![0.0; dim];
        for (k, &i) in corral.iter().enumerate() {
            for (xc, pc) in x.iter_mut().zip(&points[i]) {
                *xc += weights[k] * pc;
            }
        }
    }
    let n = norm2(&x).sqrt();
    Ok((x, n))
}

/// Solve `min ||sum_k u_k p_{corral[k]}||` subject to `sum u_k = 1`
/// (affine weights, possibly negative).
fn affine_min_norm(points: &[Vec<f64>], corral: &[usize]) -> Vec<f64> {
    use nalgebra::DMatrix;
    let m = corral.len();
    if m == 1 {
        return vec![1.0];
    }
    // KKT system: [G 1; 1^T 0] [u; nu] = [0; 1], G = Gram matrix.
    let mut a = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            let g: f64 = points[corral[i]]
                .iter()
                .zip(&points[corral[j]])
                .map(|(x, y)| x * y)
                .sum();
            a[(i, j)] = g;
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    let mut b = nalgebra::DVector::zeros(m + 1);
    b[m] = 1.0;
    // Regularize slightly in case of affinely dependent corrals.
    for i in 0..m {
        a[(i, i)] += 1e-13;
    }
    match a.lu().solve(&b) {
        Some(sol) => (0..m).map(|i| sol[i]).collect(),
        None => {
            // Degenerate: fall back to uniform weights.
            vec![1.0 / m as f64; m]
        }
    }
}
