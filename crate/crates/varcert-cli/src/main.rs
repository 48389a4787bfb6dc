//! `varcert` command-line front end: parse a TOML run configuration,
//! dispatch one computation, and emit a JSON report (and optionally an
//! SVG figure). Exit codes: 0 success / KKT, 1 FJ-only certificate,
//! 2 not certifiable (or refuted / corpus mismatch), 64 config error,
//! 70 compute error.

mod config;
mod plot;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use varcert::convexsets::{RealSet1D, SetOracle};
use varcert::corpus;
use varcert::funcspace::sublevel_interval_1d;
use varcert::levelcone::{normal_cone_lower, ConstraintSystem};
use varcert::optcert::{fj_search, penalize_certify, Classification};
use varcert::gencvx::{sq_check, SamplePlan};
use varcert::strongsub::{default_bracket, strong_interval_1d};

use config::{parse_config, parse_set, CliError, RunConfig};
use plot::{render_svg, Scene};

#[derive(Parser)]
#[command(name = "varcert", version, about = "Optimality-certification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration (required for everything except `corpus`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus case id (`corpus` only; default runs every case).
    #[arg(long, global = true)]
    case: Option<String>,
    /// Comparison tolerance for set endpoints.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed recorded in the report (all sampling is deterministic).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write an SVG figure of the 1-D result sets here.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Write the JSON report here (defaults to stdout).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, PartialEq)]
enum Command {
    /// Reconstruct a strong subdifferential interval.
    Subdiff,
    /// Test strong quasiconvexity at a declared modulus.
    Convexity,
    /// Assemble the multiplier lower estimate of the normal cone.
    Normalcone,
    /// Search for a generalized FJ/KKT certificate.
    Certify,
    /// Run the penalization procedure toward a necessary condition.
    Penalize,
    /// Rerun the registered worked examples against their expected values.
    Corpus,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(64)
        }
        Err(CliError::Compute(m)) => {
            eprintln!("compute error: {m}");
            ExitCode::from(70)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let tol = cli.tol.unwrap_or(corpus::DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(CliError::Config(format!("tol must be positive, got {tol}")));
    }
    let (name, result, anchors, code, scene) = match cli.command {
        Command::Subdiff => run_subdiff(cli)?,
        Command::Convexity => run_convexity(cli)?,
        Command::Normalcone => run_normalcone(cli)?,
        Command::Certify => run_certify(cli)?,
        Command::Penalize => run_penalize(cli)?,
        Command::Corpus => run_corpus(cli, tol)?,
    };

    if let Some(path) = &cli.plot {
        let scene = scene.ok_or_else(|| {
            CliError::Config(format!("--plot is not supported for `{name}`"))
        })?;
        std::fs::write(path, render_svg(&scene))
            .map_err(|e| CliError::Compute(format!("cannot write plot: {e}")))?;
    }

    let report = json!({
        "command": name,
        "seed": cli.seed,
        "tol": tol,
        "paper_anchors": anchors,
        "result": result,
    });
    let text = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
    match &cli.report {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Compute(format!("cannot write report: {e}")))?,
        None => print!("{text}"),
    }
    Ok(code)
}

type Dispatch = (&'static str, Value, BTreeMap<String, String>, u8, Option<Scene>);

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    parse_config(path)
}

/// Finite plot window: the set itself when bounded, else a window of
/// radius 2 around `xbar`.
fn window(set: &RealSet1D, xbar: f64) -> (f64, f64) {
    if !set.is_empty() && set.is_bounded() && set.sup() > set.inf() {
        (set.inf(), set.sup())
    } else {
        (xbar - 2.0, xbar + 2.0)
    }
}

fn run_subdiff(cli: &Cli) -> Result<Dispatch, CliError> {
    let cfg = load(cli)?;
    let f = cfg.single_function()?;
    let spec = cfg.single_spec()?;
    let xbar = cfg.problem.xbar;
    let approx = strong_interval_1d(&f, xbar, &spec, default_bracket(), 1e-6)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let k_set = parse_set(cfg.spec.k.as_deref().unwrap(), "spec.k")?;
    let (lo, hi) = window(&k_set, xbar);
    let sublevel = sublevel_interval_1d(&f, xbar, false, lo, hi, 512)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let scene = Scene::new("strong subdifferential", lo, hi)
        .with_function(&f)
        .with_band("sublevel set", sublevel)
        .with_band("subdifferential", approx.inner.clone());
    let result = json!({
        "set": approx.inner.to_string(),
        "outer": approx.outer.to_string(),
        "resolution": approx.resolution,
        "grid_points": approx.grid_points,
        "note": approx.note,
    });
    Ok(("subdiff", result, cfg.anchors, 0, Some(scene)))
}

fn run_convexity(cli: &Cli) -> Result<Dispatch, CliError> {
    let cfg = load(cli)?;
    let f = cfg.single_function()?;
    let cvx = cfg
        .convexity
        .clone()
        .ok_or_else(|| CliError::Config("missing [convexity] section".into()))?;
    let region = parse_set(&cvx.region, "convexity.region")?;
    let report = sq_check(&f, &SetOracle::from_interval(region), cvx.modulus, &SamplePlan::default());
    let verified = report.is_verified();
    let result = serde_json::to_value(&report)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    Ok(("convexity", result, cfg.anchors, if verified { 0 } else { 2 }, None))
}

fn build_system(cfg: &RunConfig) -> Result<(ConstraintSystem, f64), CliError> {
    let pairs = cfg.constraint_specs()?;
    let omega = cfg.omega()?;
    let (gs, specs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let cs = ConstraintSystem::new(gs, specs, SetOracle::from_interval(omega))
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok((cs, cfg.problem.xbar))
}

fn run_normalcone(cli: &Cli) -> Result<Dispatch, CliError> {
    let cfg = load(cli)?;
    let (cs, xbar) = build_system(&cfg)?;
    let desc =
        normal_cone_lower(&cs, &[xbar]).map_err(|e| CliError::Compute(e.to_string()))?;
    let omega = cfg.omega()?;
    let omega_cone = omega
        .normal_cone_at(xbar)
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let (lo, hi) = window(&omega, xbar);
    let scene = Scene::new("normal cone lower estimate", lo, hi)
        .with_band("feasible set", omega)
        .with_band("lower estimate", desc.as_interval.clone())
        .with_band("normal cone", omega_cone.clone());
    let result = json!({
        "lower_estimate": desc.as_interval.to_string(),
        "closed": desc.closed,
        "validated_against_omega": desc.validated_against_omega,
        "families": desc.families.len(),
        "normal_cone_of_omega": omega_cone.to_string(),
    });
    Ok(("normalcone", result, cfg.anchors, 0, Some(scene)))
}

fn run_certify(cli: &Cli) -> Result<Dispatch, CliError> {
    let cfg = load(cli)?;
    let f = cfg.objective()?;
    let (cs, xbar) = build_system(&cfg)?;
    let cert = fj_search(&f, &cs, &[xbar]).map_err(|e| CliError::Compute(e.to_string()))?;
    let code = match cert.classification {
        Classification::Kkt => 0,
        Classification::Fj => 1,
        Classification::NotCertifiable => 2,
    };
    let result =
        serde_json::to_value(&cert).map_err(|e| CliError::Compute(e.to_string()))?;
    Ok(("certify", result, cfg.anchors, code, None))
}

fn run_penalize(cli: &Cli) -> Result<Dispatch, CliError> {
    let cfg = load(cli)?;
    let f = cfg.objective()?;
    let omega = cfg.omega()?;
    let pen = cfg
        .penalize
        .clone()
        .ok_or_else(|| CliError::Config("missing [penalize] section".into()))?;
    let report = penalize_certify(
        &f,
        &SetOracle::from_interval(omega),
        &[cfg.problem.xbar],
        pen.delta,
        &pen.k_schedule,
    )
    .map_err(|e| CliError::Compute(e.to_string()))?;
    let result =
        serde_json::to_value(&report).map_err(|e| CliError::Compute(e.to_string()))?;
    Ok(("penalize", result, cfg.anchors, 0, None))
}

fn run_corpus(cli: &Cli, tol: f64) -> Result<Dispatch, CliError> {
    let reports = match &cli.case {
        Some(id) => {
            vec![corpus::run_case(id, tol).map_err(|e| match e {
                corpus::CorpusError::UnknownCase(_) => CliError::Config(e.to_string()),
                other => CliError::Compute(other.to_string()),
            })?]
        }
        None => corpus::run_all(tol).map_err(|e| CliError::Compute(e.to_string()))?,
    };
    let all_pass = reports.iter().all(|r| r.pass);
    let mut anchors = BTreeMap::new();
    for r in &reports {
        anchors.insert(r.id.clone(), r.paper_anchor.clone());
    }
    let result =
        serde_json::to_value(&reports).map_err(|e| CliError::Compute(e.to_string()))?;
    Ok(("corpus", result, anchors, if all_pass { 0 } else { 2 }, None))
}
