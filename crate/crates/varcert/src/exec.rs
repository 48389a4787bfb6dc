//! Sequential/parallel execution of embarrassingly parallel grid sweeps.
//!
//! Every sweep in the library is a pure map over an input slice followed by
//! an associative reduction, so the parallel and sequential paths are
//! observationally identical. `ExecMode` picks the path at run time; when
//! the `parallel` feature is disabled, `Parallel` silently degrades to the
//! sequential path so callers never need to care.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which execution path a grid sweep should take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon data-parallel sweep (falls back to sequential when the
    /// `parallel` feature is off).
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `items` and return the minimum value together with the
/// index attaining it. Ties resolve to the smallest index in both modes.
pub fn min_by_key<T, F>(items: &[T], mode: ExecMode, f: F) -> Option<(usize, f64)>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let pick = |a: (usize, f64), b: (usize, f64)| -> (usize, f64) {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items
            .par_iter()
            .enumerate()
            .map(|(i, t)| (i, f(t)))
            .reduce_with(pick),
        _ => items
            .iter()
            .enumerate()
            .map(|(i, t)| (i, f(t)))
            .reduce(pick),
    }
}

/// Map `f` over `items`, collecting results in input order.
pub fn map_collect<T, R, F>(items: &[T], mode: ExecMode, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// True iff `f` holds for every item. Short-circuits in both modes.
pub fn all<T, F>(items: &[T], mode: ExecMode, f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().all(f),
        _ => items.iter().all(f),
    }
}

/// First item (by index) failing predicate `f`, if any.
pub fn first_failure<T, F>(items: &[T], mode: ExecMode, f: F) -> Option<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items
            .par_iter()
            .enumerate()
            .filter(|(_, t)| !f(t))
            .map(|(i, _)| i)
            .min(),
        _ => items.iter().position(|t| !f(t)),
    }
}
