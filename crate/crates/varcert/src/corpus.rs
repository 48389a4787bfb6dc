//! Registry of worked examples with exact expected answers.
//!
//! The cases live in `corpus_cases.toml` (embedded at compile time; the
//! schema is documented at the top of that file). Each case records the
//! inputs of a computation, the expected answer in interval notation or
//! as a verdict string, and a citation anchor; [`run_case`] reruns the
//! computation with the library modules and compares. Failures carry the
//! anchor so a mismatch names the line being contradicted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexsets::{RealSet1D, SetOracle};
use crate::funcspace::{catalog_instantiate, FnModel, Params};
use crate::gencvx::{qfp_build, sq_check, QFPInstance, SamplePlan};
use crate::levelcone::{max_rule_check, normal_cone_lower, ConstraintSystem, MaxRuleOutcome};
use crate::optcert::{
    fj_search, gcq_check, penalize_certify, sufficiency_growth, Classification, FJCertificate,
    GcqOutcome, PenalizeOutcome,
};
use crate::strongsub::{
    default_bracket, f_regularity_check, strong_interval_1d, DerivVariant, FRegVerdict,
    SubdiffSpec,
};

const CASES_TOML: &str = include_str!("corpus_cases.toml");

/// Default endpoint tolerance for set comparisons.
pub const DEFAULT_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus case `{0}`")]
    UnknownCase(String),
    #[error("malformed corpus entry: {0}")]
    Malformed(String),
    #[error("corpus computation failed: {0}")]
    Compute(String),
}

// ----- raw TOML schema ----------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
struct RawCorpus {
    case: Vec<RawCase>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawCase {
    id: String,
    paper_anchor: String,
    check: Vec<RawCheck>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawCheck {
    label: String,
    quantity: String,
    #[serde(default)]
    function: Option<String>,
    #[serde(default)]
    functions: Vec<String>,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(default)]
    gamma: Option<f64>,
    #[serde(default)]
    k: Option<String>,
    #[serde(default)]
    betas: Vec<f64>,
    #[serde(default)]
    gammas: Vec<f64>,
    #[serde(default)]
    ks: Vec<String>,
    #[serde(default)]
    omega: Option<String>,
    #[serde(default)]
    xbar: Option<f64>,
    #[serde(default)]
    gamma0: Option<f64>,
    #[serde(default)]
    mu0: Option<f64>,
    #[serde(default)]
    xi0: Option<f64>,
    #[serde(default)]
    v: Option<f64>,
    #[serde(default)]
    qfp: Option<QFPInstance>,
    #[serde(default)]
    expected_set: Option<String>,
    #[serde(default)]
    expected_verdict: Option<String>,
    #[serde(default)]
    expected_value: Option<f64>,
}

// ----- public case view ---------------------------------------------------

/// One registered corpus case: inputs, expected answers, citation.
#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: String,
    pub paper_anchor: String,
    /// Expected quantities as (label, expected answer rendered to text).
    pub expected: Vec<(String, String)>,
    raw: RawCase,
}

/// Result of re-deriving one expected quantity.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub label: String,
    pub pass: bool,
    pub computed: String,
    pub expected: String,
}

/// Per-case report; `pass` iff every check passed.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub paper_anchor: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

fn parse_corpus() -> Result<Vec<CorpusCase>, CorpusError> {
    let raw: RawCorpus =
        toml::from_str(CASES_TOML).map_err(|e| CorpusError::Malformed(e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for case in raw.case {
        if !seen.insert(case.id.clone()) {
            return Err(CorpusError::Malformed(format!("duplicate case id `{}`", case.id)));
        }
        let expected = case
            .check
            .iter()
            .map(|c| {
                let e = c
                    .expected_set
                    .clone()
                    .or_else(|| c.expected_verdict.clone())
                    .or_else(|| c.expected_value.map(|v| v.to_string()))
                    .unwrap_or_else(|| "(unspecified)".into());
                (c.label.clone(), e)
            })
            .collect();
        out.push(CorpusCase {
            id: case.id.clone(),
            paper_anchor: case.paper_anchor.clone(),
            expected,
            raw: case,
        });
    }
    Ok(out)
}

/// All registered cases in file order (deterministic).
pub fn list_cases() -> Vec<String> {
    parse_corpus()
        .expect("embedded corpus must parse")
        .into_iter()
        .map(|c| c.id)
        .collect()
}

/// Load a case by id.
pub fn get_case(id: &str) -> Result<CorpusCase, CorpusError> {
    parse_corpus()?
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| CorpusError::UnknownCase(id.to_string()))
}

// ----- dispatch -----------------------------------------------------------

fn need<T: Clone>(opt: &Option<T>, what: &str, label: &str) -> Result<T, CorpusError> {
    opt.clone()
        .ok_or_else(|| CorpusError::Malformed(format!("check `{label}` is missing `{what}`")))
}

fn parse_set(s: &str, label: &str) -> Result<RealSet1D, CorpusError> {
    s.parse()
        .map_err(|_| CorpusError::Malformed(format!("check `{label}`: bad set notation `{s}`")))
}

fn instantiate(id: &str, label: &str) -> Result<FnModel, CorpusError> {
    catalog_instantiate(id, &Params::new())
        .map_err(|e| CorpusError::Malformed(format!("check `{label}`: {e}")))
}

fn build_system(check: &RawCheck) -> Result<(ConstraintSystem, f64), CorpusError> {
    let label = &check.label;
    if check.functions.len() != check.betas.len()
        || check.functions.len() != check.gammas.len()
        || check.functions.len() != check.ks.len()
    {
        return Err(CorpusError::Malformed(format!(
            "check `{label}`: functions/betas/gammas/ks lengths differ"
        )));
    }
    let mut gs = Vec::new();
    let mut specs = Vec::new();
    for (i, fid) in check.functions.iter().enumerate() {
        gs.push(instantiate(fid, label)?);
        let k = parse_set(&check.ks[i], label)?;
        specs.push(
            SubdiffSpec::on_line(check.betas[i], check.gammas[i], k)
                .map_err(|e| CorpusError::Malformed(format!("check `{label}`: {e}")))?,
        );
    }
    let omega = parse_set(&need(&check.omega, "omega", label)?, label)?;
    let cs = ConstraintSystem::new(gs, specs, SetOracle::from_interval(omega))
        .map_err(|e| CorpusError::Malformed(format!("check `{label}`: {e}")))?;
    let xbar = need(&check.xbar, "xbar", label)?;
    Ok((cs, xbar))
}

fn compare_sets(computed: &RealSet1D, expected: &RealSet1D, tol: f64) -> bool {
    computed.approx_eq(expected, tol)
}

fn run_check(check: &RawCheck, tol: f64) -> Result<CheckResult, CorpusError> {
    let label = check.label.clone();
    let compute_err = |e: String| CorpusError::Compute(format!("check `{label}`: {e}"));
    let (computed, pass, expected) = match check.quantity.as_str() {
        "strong_interval" => {
            let f = instantiate(&need(&check.function, "function", &label)?, &label)?;
            let k = parse_set(&need(&check.k, "k", &label)?, &label)?;
            let spec = SubdiffSpec::on_line(
                need(&check.beta, "beta", &label)?,
                need(&check.gamma, "gamma", &label)?,
                k,
            )
            .map_err(|e| compute_err(e.to_string()))?;
            let xbar = need(&check.xbar, "xbar", &label)?;
            let approx = strong_interval_1d(&f, xbar, &spec, default_bracket(), 1e-6)
                .map_err(|e| compute_err(e.to_string()))?;
            let expected =
                parse_set(&need(&check.expected_set, "expected_set", &label)?, &label)?;
            let pass = compare_sets(&approx.inner, &expected, tol);
            (approx.inner.to_string(), pass, expected.to_string())
        }
        "normal_cone_lower" => {
            let (cs, xbar) = build_system(check)?;
            let desc =
                normal_cone_lower(&cs, &[xbar]).map_err(|e| compute_err(e.to_string()))?;
            let expected =
                parse_set(&need(&check.expected_set, "expected_set", &label)?, &label)?;
            let pass = compare_sets(&desc.as_interval, &expected, tol)
                && desc.validated_against_omega;
            (desc.as_interval.to_string(), pass, expected.to_string())
        }
        "normal_cone_of_omega" => {
            let omega = parse_set(&need(&check.omega, "omega", &label)?, &label)?;
            let xbar = need(&check.xbar, "xbar", &label)?;
            let cone =
                omega.normal_cone_at(xbar).map_err(|e| compute_err(e.to_string()))?;
            let expected =
                parse_set(&need(&check.expected_set, "expected_set", &label)?, &label)?;
            let pass = compare_sets(&cone, &expected, tol);
            (cone.to_string(), pass, expected.to_string())
        }
        "max_rule" => {
            let mut gs = Vec::new();
            let mut specs = Vec::new();
            for (i, fid) in check.functions.iter().enumerate() {
                gs.push(instantiate(fid, &label)?);
                let k = parse_set(&check.ks[i], &label)?;
                specs.push(
                    SubdiffSpec::on_line(check.betas[i], check.gammas[i], k)
                        .map_err(|e| compute_err(e.to_string()))?,
                );
            }
            let outer = parse_set(&need(&check.k, "k", &label)?, &label)?;
            let xbar = need(&check.xbar, "xbar", &label)?;
            let report =
                max_rule_check(&gs, xbar, &specs, &SetOracle::from_interval(outer))
                    .map_err(|e| compute_err(e.to_string()))?;
            let verdict = match report.outcome {
                MaxRuleOutcome::Equality => "equality",
                MaxRuleOutcome::InclusionOnly { .. } => "inclusion_only",
            };
            let expected = need(&check.expected_verdict, "expected_verdict", &label)?;
            let pass = verdict == expected && report.forward_inclusion_ok;
            (verdict.to_string(), pass, expected)
        }
        "fj_classification" => {
            let f = instantiate(&need(&check.function, "function", &label)?, &label)?;
            let (cs, xbar) = build_system(check)?;
            let cert =
                fj_search(&f, &cs, &[xbar]).map_err(|e| compute_err(e.to_string()))?;
            let verdict = match cert.classification {
                Classification::Kkt => "kkt",
                Classification::Fj => "fj",
                Classification::NotCertifiable => "not_certifiable",
            };
            let expected = need(&check.expected_verdict, "expected_verdict", &label)?;
            let mut pass = verdict == expected;
            if let Some(floor) = check.expected_value {
                pass = pass && cert.residual >= floor;
            }
            (
                format!("{verdict} (residual {:.3e})", cert.residual),
                pass,
                expected,
            )
        }
        "gcq" => {
            let (cs, xbar) = build_system(check)?;
            let report = gcq_check(&cs, &[xbar]).map_err(|e| compute_err(e.to_string()))?;
            let verdict = match report.outcome {
                GcqOutcome::Holds => "holds",
                GcqOutcome::FailsWitness { .. } => "fails",
            };
            let expected = need(&check.expected_verdict, "expected_verdict", &label)?;
            let pass = verdict == expected;
            (verdict.to_string(), pass, expected)
        }
        "f_regularity" => {
            let f = instantiate(&need(&check.function, "function", &label)?, &label)?;
            let k = parse_set(&need(&check.k, "k", &label)?, &label)?;
            let spec = SubdiffSpec::on_line(
                need(&check.beta, "beta", &label)?,
                need(&check.gamma, "gamma", &label)?,
                k,
            )
            .map_err(|e| compute_err(e.to_string()))?;
            let xbar = need(&check.xbar, "xbar", &label)?;
            let dirs = vec![vec![1.0], vec![-1.0], vec![0.5], vec![-0.5]];
            let verdict =
                f_regularity_check(&f, &[xbar], &spec, &dirs, DerivVariant::Hadamard)
                    .map_err(|e| compute_err(e.to_string()))?;
            let name = match verdict {
                FRegVerdict::Regular { .. } => "regular",
                FRegVerdict::CounterDirection { .. } => "counter_direction",
            };
            let expected = need(&check.expected_verdict, "expected_verdict", &label)?;
            let pass = name == expected;
            (name.to_string(), pass, expected)
        }
        "sufficiency_growth" => {
            let f = instantiate(&need(&check.function, "function", &label)?, &label)?;
            let (cs, xbar) = build_system(check)?;
            let gamma0 = need(&check.gamma0, "gamma0", &label)?;
            let cert = FJCertificate {
                gamma0,
                gamma0_hat: if gamma0 == 0.0 { 1 } else { 0 },
                mu: [(0usize, need(&check.mu0, "mu0", &label)?)].into_iter().collect(),
                subgradients: [(0usize, need(&check.xi0, "xi0", &label)?)]
                    .into_iter()
                    .collect(),
                objective_vector: need(&check.v, "v", &label)?,
                unit_horizon: false,
                residual: 0.0,
                classification: Classification::Kkt,
            };
            let report = sufficiency_growth(&f, &cs, &[xbar], &cert, 0.5, 256)
                .map_err(|e| compute_err(e.to_string()))?;
            let expected_mu = need(&check.expected_value, "expected_value", &label)?;
            let pass = report.verified && (report.mu_bar - expected_mu).abs() <= tol;
            (
                format!("mu_bar {} verified {}", report.mu_bar, report.verified),
                pass,
                format!("mu_bar {expected_mu} verified true"),
            )
        }
        "penalize" => {
            let f = instantiate(&need(&check.function, "function", &label)?, &label)?;
            let omega = parse_set(&need(&check.omega, "omega", &label)?, &label)?;
            let xbar = need(&check.xbar, "xbar", &label)?;
            let report = penalize_certify(
                &f,
                &SetOracle::from_interval(omega),
                &[xbar],
                1.0,
                &[1.0, 10.0, 100.0, 1000.0],
            )
            .map_err(|e| compute_err(e.to_string()))?;
            let (name, value) = match &report.outcome {
                PenalizeOutcome::BoundedSubgradient { v } => ("bounded", Some(v[0])),
                PenalizeOutcome::HorizonDirection { v_unit } => ("horizon", Some(v_unit[0])),
                PenalizeOutcome::NonStationaryEvidence { .. } => ("nonstationary", None),
            };
            let expected = need(&check.expected_verdict, "expected_verdict", &label)?;
            let mut pass = name == expected;
            if let (Some(want), Some(got)) = (check.expected_value, value) {
                pass = pass && (want - got).abs() <= 1e-2;
            }
            (
                match value {
                    Some(v) => format!("{name} (v {v:.6})"),
                    None => name.to_string(),
                },
                pass,
                expected,
            )
        }
        "qfp_sq_verified" => {
            let inst = need(&check.qfp, "qfp", &label)?;
            let h = qfp_build(&inst).map_err(|e| compute_err(e.to_string()))?;
            let region = inst.region_k().map_err(|e| compute_err(e.to_string()))?;
            let modulus = need(&check.expected_value, "expected_value", &label)?;
            let report = sq_check(&h, &region, modulus, &SamplePlan::default());
            let pass = report.is_verified()
                && need(&check.expected_verdict, "expected_verdict", &label)? == "verified";
            (
                format!("verified {} at modulus {modulus}", report.is_verified()),
                pass,
                format!("verified true at modulus {modulus}"),
            )
        }
        other => {
            return Err(CorpusError::Malformed(format!(
                "check `{label}`: unknown quantity `{other}`"
            )));
        }
    };
    Ok(CheckResult { label: check.label.clone(), pass, computed, expected })
}

/// Rerun every expected quantity of a case and compare at tolerance
/// `tol` (set endpoints within `tol`; verdicts exactly).
pub fn run_case(id: &str, tol: f64) -> Result<CaseReport, CorpusError> {
    let case = get_case(id)?;
    let mut checks = Vec::new();
    for raw in &case.raw.check {
        checks.push(run_check(raw, tol)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CaseReport { id: case.id, paper_anchor: case.paper_anchor, checks, pass })
}

/// Run the full corpus; failures keep going so the report is complete.
pub fn run_all(tol: f64) -> Result<Vec<CaseReport>, CorpusError> {
    let mut out = Vec::new();
    for id in list_cases() {
        out.push(run_case(&id, tol)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_cases_is_deterministic_and_contains_the_named_cases() {
        let ids = list_cases();
        assert!(!ids.is_empty());
        assert_eq!(ids, list_cases());
        for want in [
            "ex_4_1_strict_normal_cone",
            "rem_4_1_fh_regular",
            "ex_5_3_gcq",
            "ex_3_1_max_rule_strict",
        ] {
            assert!(ids.iter().any(|i| i == want), "missing {want}");
        }
    }

    #[test]
    fn unknown_case_is_rejected() {
        match run_case("no_such_case", DEFAULT_TOL) {
            Err(CorpusError::UnknownCase(_)) => {}
            other => panic!("expected UnknownCase, got {other:?}"),
        }
    }

    #[test]
    fn every_expected_quantity_carries_an_anchor() {
        for id in list_cases() {
            let case = get_case(&id).unwrap();
            assert!(!case.paper_anchor.trim().is_empty(), "{id} has no anchor");
            assert!(!case.expected.is_empty(), "{id} has no expected quantities");
        }
    }

    #[test]
    fn full_corpus_passes_at_default_tolerances() {
        let reports = run_all(DEFAULT_TOL).unwrap();
        let mut failures = Vec::new();
        for report in &reports {
            for check in &report.checks {
                if !check.pass {
                    failures.push(format!(
                        "{} / {}: computed {} expected {} [{}]",
                        report.id, check.label, check.computed, check.expected,
                        report.paper_anchor
                    ));
                }
            }
        }
        assert!(failures.is_empty(), "corpus failures:\n{}", failures.join("\n"));
    }
}
