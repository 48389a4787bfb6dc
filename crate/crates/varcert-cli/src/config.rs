//! TOML run configuration. Unknown keys are rejected at every level so a
//! typo fails loudly instead of silently falling back to a default.

use std::collections::BTreeMap;

use serde::Deserialize;

use varcert::convexsets::RealSet1D;
use varcert::funcspace::{catalog_instantiate, FnModel, Params};
use varcert::strongsub::SubdiffSpec;

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemCfg,
    #[serde(default)]
    pub spec: SpecCfg,
    #[serde(default)]
    pub convexity: Option<ConvexityCfg>,
    #[serde(default)]
    pub penalize: Option<PenalizeCfg>,
    /// Citation anchors copied verbatim into the report's
    /// `paper_anchors` section, keyed by quantity label.
    #[serde(default)]
    pub anchors: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ProblemCfg {
    /// Catalog id of the objective (certify / penalize).
    pub objective: Option<String>,
    /// Catalog id of a single function (subdiff / convexity).
    pub function: Option<String>,
    /// Catalog ids of the inequality constraints (normalcone / certify).
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub xbar: f64,
    /// Feasible set in interval notation, e.g. "[0,1]".
    pub omega: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SpecCfg {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// Window `K` in interval notation.
    pub k: Option<String>,
    #[serde(default)]
    pub betas: Vec<f64>,
    #[serde(default)]
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub ks: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexityCfg {
    /// Strong-quasiconvexity modulus to test.
    pub modulus: f64,
    /// Region in interval notation.
    pub region: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenalizeCfg {
    pub delta: f64,
    pub k_schedule: Vec<f64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config file (exit 64).
    Config(String),
    /// The computation itself failed (exit 70).
    Compute(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Compute(m) => write!(f, "compute error: {m}"),
        }
    }
}

pub fn parse_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_set(s: &str, what: &str) -> Result<RealSet1D, CliError> {
    s.parse()
        .map_err(|_| CliError::Config(format!("{what}: bad interval notation `{s}`")))
}

pub fn instantiate(id: &str) -> Result<FnModel, CliError> {
    catalog_instantiate(id, &Params::new())
        .map_err(|e| CliError::Config(format!("function `{id}`: {e}")))
}

impl RunConfig {
    pub fn single_function(&self) -> Result<FnModel, CliError> {
        let id = self
            .problem
            .function
            .as_deref()
            .ok_or_else(|| CliError::Config("missing problem.function".into()))?;
        instantiate(id)
    }

    pub fn single_spec(&self) -> Result<SubdiffSpec, CliError> {
        let beta =
            self.spec.beta.ok_or_else(|| CliError::Config("missing spec.beta".into()))?;
        let gamma =
            self.spec.gamma.ok_or_else(|| CliError::Config("missing spec.gamma".into()))?;
        let k = parse_set(
            self.spec.k.as_deref().ok_or_else(|| CliError::Config("missing spec.k".into()))?,
            "spec.k",
        )?;
        SubdiffSpec::on_line(beta, gamma, k).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn constraint_specs(&self) -> Result<Vec<(FnModel, SubdiffSpec)>, CliError> {
        let n = self.problem.functions.len();
        if n == 0 {
            return Err(CliError::Config("missing problem.functions".into()));
        }
        if self.spec.betas.len() != n || self.spec.gammas.len() != n || self.spec.ks.len() != n
        {
            return Err(CliError::Config(
                "spec.betas/gammas/ks must match problem.functions in length".into(),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let g = instantiate(&self.problem.functions[i])?;
            let k = parse_set(&self.spec.ks[i], "spec.ks")?;
            let spec = SubdiffSpec::on_line(self.spec.betas[i], self.spec.gammas[i], k)
                .map_err(|e| CliError::Config(e.to_string()))?;
            out.push((g, spec));
        }
        Ok(out)
    }

    pub fn omega(&self) -> Result<RealSet1D, CliError> {
        parse_set(
            self.problem
                .omega
                .as_deref()
                .ok_or_else(|| CliError::Config("missing problem.omega".into()))?,
            "problem.omega",
        )
    }

    pub fn objective(&self) -> Result<FnModel, CliError> {
        let id = self
            .problem
            .objective
            .as_deref()
            .ok_or_else(|| CliError::Config("missing problem.objective".into()))?;
        instantiate(id)
    }
}
