//! Strong subdifferentials and optimality certificates for nonsmooth
//! scalar optimization.
//!
//! The library is organized around a small set of exact 1-D primitives
//! (interval unions, cones, support functions) and sampling-based evidence
//! in higher dimensions:
//!
//! - [`convexsets`] — exact 1-D set algebra ([`convexsets::RealSet1D`]),
//!   membership oracles, polar/tangent/normal-cone predicates, and a
//!   minimum-norm-point solver over convex hulls.
//! - [`funcspace`] — extended-real-valued function models, Dini/Hadamard
//!   upper directional derivatives, sublevel-set machinery, and the
//!   catalog of built-in test functions.
//! - [`strongsub`] — membership and 1-D reconstruction of the strong
//!   subdifferential, the classical subdifferentials it is compared
//!   against, and F-regularity checks.
//! - [`gencvx`] — strong-quasiconvexity verification/refutation, modulus
//!   estimation, and the quadratic-fractional family.
//! - [`levelcone`] — normal cones of sublevel-type feasible sets, Slater
//!   conditions, and max-rule calculus.
//! - [`optcert`] — Fritz-John / KKT certificate search, constraint
//!   qualifications, quadratic-growth sufficiency, and the penalization
//!   procedure.
//! - [`corpus`] — a registry of worked examples with expected exact
//!   answers, runnable as an oracle suite.
//!
//! Grid sweeps are data-parallel via rayon when the `parallel` feature
//! (on by default) is enabled; [`exec::ExecMode`] selects the path at
//! run time so both can be exercised and benchmarked.

pub mod convexsets;
pub mod corpus;
pub mod exec;
pub mod funcspace;
pub mod gencvx;
pub mod levelcone;
pub mod optcert;
pub mod strongsub;

/// Default tolerance for closed-inequality membership tests.
pub const TOL_MEMBER: f64 = 1e-9;
/// Minimum violation margin required to report a strict inequality.
pub const TOL_STRICT: f64 = 1e-12;
/// Residual tolerance for certificate classification.
pub const TOL_RESIDUAL: f64 = 1e-7;
/// Active-constraint tolerance.
pub const EPS_ACT: f64 = 1e-8;
/// Magnitude beyond which a 1-D set endpoint is reported as infinite.
pub const UNBOUNDED_SENTINEL: f64 = 1e6;
