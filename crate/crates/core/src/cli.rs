//! Command-line front end.
//!
//! Every subcommand resolves its flags, overlays an optional JSON config and
//! fills defaults into a [`RunConfig`]. The resolved config is echoed into the
//! JSON sidecar, and feeding that sidecar back through `--config` reproduces
//! the run. Tables go to `PREFIX.csv` with `--out PREFIX`, to stdout
//! otherwise; a one-line summary always goes to stderr.
//!
//! Exit codes: 0 success, 1 runtime error or failed verdict, 2 usage error.

use crate::confcurve::{cc_from_im, linspace, recalibrate_exact, two_normal_curve, ConfidenceCurve, Functional, DEFAULT_GRID};
use crate::engine::{belief, BeliefOptions, Method};
use crate::error::ImError;
use crate::fiducial::{sample_gfd, FiducialOptions, DEFAULT_FLOOR};
use crate::model::{Model, Norm, TieRule};
use crate::point::Point;
use crate::randomset::{builtin_discrete, check_validity_condition, NestedFamily};
use crate::sets::{IntSet, ParamSet};
use crate::validate::{
    belief_validity_exact, belief_validity_sim, build_oracle, build_oracle_sampled, cc_coverage_sim, check_theorems,
    support_window, MAX_WINDOW,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "im", about = "Inferential models, fiducial sampling and confidence curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Confidence curve on a grid, with confidence sets at the requested levels.
    Cc(Flags),
    /// Belief and plausibility of assertions.
    Belief(Flags),
    /// Draws from the generalized fiducial distribution.
    Fiducial(Flags),
    /// Validity condition, curve coverage and belief validity by simulation.
    Validate(Flags),
    /// Exact belief, plausibility and fiducial tables for a discrete model.
    Oracle(Flags),
}

/// Flags shared by all subcommands; each one reads the fields it needs.
#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON document whose fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// normal-location, two-normal, exp-rate or discrete-shift:N.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    data: Option<Vec<f64>>,
    /// left, right, two-sided or offset.
    #[arg(long)]
    randomset: Option<String>,
    /// CSV of (u, γ) knots, linearly interpolated.
    #[arg(long)]
    gamma_table: Option<PathBuf>,
    /// Interval-union or finite-set string; repeatable.
    #[arg(long = "assertion")]
    assertions: Option<Vec<String>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    levels: Option<Vec<f64>>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["LO", "HI"])]
    window: Option<Vec<f64>>,
    /// Grid points across the window.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    n_mc: Option<usize>,
    #[arg(long)]
    n_rep: Option<usize>,
    /// Fiducial draws.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// l2 or linf.
    #[arg(long)]
    norm: Option<String>,
    /// leftmost, rightmost or avoid:SET.
    #[arg(long)]
    tie_rule: Option<String>,
    /// mu-x, mu-y or ratio, for two-normal curves.
    #[arg(long)]
    functional: Option<String>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    theta0: Option<Vec<f64>>,
    /// auto, exact or monte-carlo.
    #[arg(long)]
    method: Option<String>,
    /// Recalibrate the curve against the fiducial distribution.
    #[arg(long)]
    recalibrate: bool,
    /// Output prefix for PREFIX.csv and PREFIX.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Resolved run configuration. Unset fields are filled by the subcommand's
/// defaults before the run and echoed filled.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    pub data: Option<Vec<f64>>,
    pub randomset: Option<String>,
    pub gamma_table: Option<PathBuf>,
    pub assertions: Option<Vec<String>>,
    pub levels: Option<Vec<f64>>,
    pub window: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub n_mc: Option<usize>,
    pub n_rep: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub norm: Option<String>,
    pub tie_rule: Option<String>,
    pub functional: Option<String>,
    pub theta0: Option<Vec<f64>>,
    pub method: Option<String>,
    pub recalibrate: Option<bool>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            model, data, randomset, gamma_table, assertions, levels, window, points, n_mc, n_rep, n, seed, epsilon,
            norm, tie_rule, functional, theta0, method, recalibrate, out
        )
    }

    /// Reads a config document: either a bare config or a sidecar holding one
    /// under `config`.
    pub fn from_json(text: &str) -> Result<RunConfig, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
        let inner = match v.get("config") {
            Some(c) if c.is_object() => c.clone(),
            _ => v,
        };
        serde_json::from_value(inner).map_err(|e| format!("config: {e}"))
    }
}

impl From<Flags> for RunConfig {
    fn from(f: Flags) -> Self {
        RunConfig {
            model: f.model,
            data: f.data,
            randomset: f.randomset,
            gamma_table: f.gamma_table,
            assertions: f.assertions,
            levels: f.levels,
            window: f.window,
            points: f.points,
            n_mc: f.n_mc,
            n_rep: f.n_rep,
            n: f.n,
            seed: f.seed,
            epsilon: f.epsilon,
            norm: f.norm,
            tie_rule: f.tie_rule,
            functional: f.functional,
            theta0: f.theta0,
            method: f.method,
            recalibrate: f.recalibrate.then_some(true),
            out: f.out,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(ImError),
}

impl From<ImError> for Failure {
    fn from(e: ImError) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

// bad inputs surface from parsing as these
fn as_usage(e: ImError) -> Failure {
    match e {
        ImError::UnknownModel(_)
        | ImError::UnknownRandomSet(_)
        | ImError::Parse(_)
        | ImError::InvalidArgument(_)
        | ImError::Unsupported(_)
        | ImError::WindowTooLarge { .. } => Failure::Usage(e.to_string()),
        e => Failure::Runtime(e),
    }
}

/// Output of a subcommand before it is written.
struct Outcome {
    csv: String,
    sidecar: Value,
    summary: String,
    passed: bool,
}

/// Runs the command line (without the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("im")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(passed) => i32::from(!passed),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool, Failure> {
    let (name, flags) = match cmd {
        Command::Cc(f) => ("cc", f),
        Command::Belief(f) => ("belief", f),
        Command::Fiducial(f) => ("fiducial", f),
        Command::Validate(f) => ("validate", f),
        Command::Oracle(f) => ("oracle", f),
    };
    let file = flags.config.clone();
    let mut cfg = RunConfig::from(flags);
    if let Some(path) = file {
        let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        cfg = cfg.overlay(RunConfig::from_json(&text).map_err(usage)?);
    }
    let out = match name {
        "cc" => cmd_cc(&mut cfg)?,
        "belief" => cmd_belief(&mut cfg)?,
        "fiducial" => cmd_fiducial(&mut cfg)?,
        "validate" => cmd_validate(&mut cfg)?,
        _ => cmd_oracle(&mut cfg)?,
    };
    let mut sidecar = json!({ "command": name, "config": cfg });
    if let (Value::Object(s), Value::Object(extra)) = (&mut sidecar, out.sidecar) {
        s.extend(extra);
    }
    match &cfg.out {
        Some(prefix) => {
            std::fs::write(with_ext(prefix, "csv"), &out.csv).map_err(ImError::from)?;
            let text = serde_json::to_string_pretty(&sidecar).map_err(ImError::from)?;
            std::fs::write(with_ext(prefix, "json"), text + "\n").map_err(ImError::from)?;
        }
        None => print!("{}", out.csv),
    }
    eprintln!("{name}: {}", out.summary);
    Ok(out.passed)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Nine significant digits, shortest form.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float");
    let a = r.abs();
    if a != 0.0 && !(1e-5..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn model_only(cfg: &RunConfig) -> Result<Model, Failure> {
    let name = cfg.model.as_deref().ok_or_else(|| usage("--model is required"))?;
    Model::from_name(name).map_err(as_usage)
}

fn model_of(cfg: &RunConfig) -> Result<(Model, Point), Failure> {
    let model = model_only(cfg)?;
    let name = cfg.model.as_deref().unwrap_or_default();
    let data = cfg.data.as_deref().ok_or_else(|| usage("--data is required"))?;
    if data.len() != model.aux_dim() {
        return Err(usage(format!("{name} takes {} data values, got {}", model.aux_dim(), data.len())));
    }
    Ok((model, Point::from_slice(data).expect("checked length")))
}

fn family_of(cfg: &mut RunConfig, model: &Model) -> Result<NestedFamily, Failure> {
    if let Some(path) = &cfg.gamma_table {
        if model.is_discrete() {
            return Err(usage("γ tables apply to continuous auxiliaries"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map_or("table".into(), |s| s.to_string_lossy().into_owned());
        return NestedFamily::from_csv(&name, &text).map_err(as_usage);
    }
    let name = cfg.randomset.get_or_insert_with(|| "two-sided".into()).clone();
    NestedFamily::for_aux(&name, &model.aux()).map_err(as_usage)
}

fn assertions_of(cfg: &RunConfig, model: &Model) -> Result<Vec<ParamSet>, Failure> {
    cfg.assertions
        .iter()
        .flatten()
        .map(|s| ParamSet::parse(s, &model.param_space()).map_err(as_usage))
        .collect()
}

fn seed_of(cfg: &RunConfig, what: &str) -> Result<u64, Failure> {
    cfg.seed.ok_or_else(|| usage(format!("--seed is required for {what}")))
}

fn fiducial_options(cfg: &mut RunConfig, seed: u64) -> Result<FiducialOptions, Failure> {
    let n = *cfg.n.get_or_insert(100_000);
    let epsilon = *cfg.epsilon.get_or_insert(0.0);
    let norm: Norm = cfg.norm.get_or_insert_with(|| "l2".into()).parse().map_err(as_usage)?;
    let tie = TieRule::parse(cfg.tie_rule.get_or_insert_with(|| "leftmost".into())).map_err(as_usage)?;
    Ok(FiducialOptions { n, epsilon, seed, norm, tie, floor: DEFAULT_FLOOR })
}

fn default_window(model: &Model, y: &Point, functional: Option<Functional>) -> Vec<f64> {
    match (model.name().as_str(), functional) {
        (_, Some(Functional::Ratio)) => vec![-10.0, 10.0],
        (_, Some(Functional::MuX)) => vec![y.get(0) - 6.0, y.get(0) + 6.0],
        (_, Some(Functional::MuY)) => vec![y.get(1) - 6.0, y.get(1) + 6.0],
        ("exp-rate", _) => vec![1e-3 / y.x(), 10.0 / y.x()],
        _ if model.is_discrete() => match model.aux() {
            crate::model::AuxDistribution::DiscreteUniform(n) => vec![y.x() - n as f64, y.x() + 1.0],
            _ => unreachable!(),
        },
        _ => vec![y.x() - 6.0, y.x() + 6.0],
    }
}

fn grid_of(cfg: &mut RunConfig, model: &Model, y: &Point, functional: Option<Functional>) -> Result<Vec<f64>, Failure> {
    let w = cfg.window.get_or_insert_with(|| default_window(model, y, functional)).clone();
    if w.len() != 2 || !w.iter().all(|v| v.is_finite()) || w[0] >= w[1] {
        return Err(usage("--window takes two finite values LO < HI"));
    }
    if model.is_discrete() {
        return Ok((w[0].ceil() as i64..=w[1].floor() as i64).map(|k| k as f64).collect());
    }
    let n = *cfg.points.get_or_insert(DEFAULT_GRID);
    if n < 2 {
        return Err(usage("--points must be at least 2"));
    }
    Ok(linspace(w[0], w[1], n))
}

fn build_curve(cfg: &mut RunConfig, model: &Model, y: &Point) -> Result<ConfidenceCurve, Failure> {
    if model.param_dim() == 2 {
        let f: Functional = cfg
            .functional
            .as_deref()
            .ok_or_else(|| usage("two-normal curves need --functional mu-x, mu-y or ratio"))?
            .parse()
            .map_err(as_usage)?;
        let grid = grid_of(cfg, model, y, Some(f))?;
        return Ok(two_normal_curve(f, y.get(0), y.get(1), grid)?);
    }
    let fam = family_of(cfg, model)?;
    let grid = grid_of(cfg, model, y, None)?;
    let cc = cc_from_im(model, y, &fam, grid)?;
    if *cfg.recalibrate.get_or_insert(false) {
        let seed = seed_of(cfg, "recalibration")?;
        let opts = fiducial_options(cfg, seed)?;
        return Ok(recalibrate_exact(&cc, model, y, &fam, &opts)?);
    }
    Ok(cc)
}

fn cmd_cc(cfg: &mut RunConfig) -> Result<Outcome, Failure> {
    let (model, y) = model_of(cfg)?;
    let cc = build_curve(cfg, &model, &y)?;
    let levels = cfg.levels.get_or_insert_with(|| vec![0.95]).clone();
    let mut sets = Vec::new();
    for alpha in &levels {
        if !(0.0..=1.0).contains(alpha) {
            return Err(usage(format!("level {alpha} outside [0, 1]")));
        }
        sets.push(json!({ "alpha": alpha, "set": cc.confidence_set(*alpha)?.to_string() }));
    }
    let mut csv = String::from("theta,cc\n");
    for (t, c) in cc.grid().iter().zip(cc.values()) {
        let _ = writeln!(csv, "{},{}", sig9(*t), sig9(*c));
    }
    let summary = sets
        .iter()
        .map(|s| format!("{}: {}", s["alpha"], s["set"].as_str().unwrap_or_default()))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        csv,
        sidecar: json!({
            "kind": cc.kind(),
            "provenance": cc.provenance(),
            "minimizer": cc.minimizer(),
            "levels": sets,
        }),
        summary: format!("{:?} curve over {} points; {summary}", cc.kind(), cc.grid().len()),
        passed: true,
    })
}

fn cmd_belief(cfg: &mut RunConfig) -> Result<Outcome, Failure> {
    let (model, y) = model_of(cfg)?;
    let fam = family_of(cfg, &model)?;
    let assertions = assertions_of(cfg, &model)?;
    if assertions.is_empty() {
        return Err(usage("--assertion is required"));
    }
    let method: Method = cfg.method.get_or_insert_with(|| "auto".into()).parse().map_err(as_usage)?;
    let seed = if method == Method::Exact { cfg.seed.unwrap_or(0) } else { seed_of(cfg, "Monte Carlo belief")? };
    cfg.seed = Some(seed);
    let opts = BeliefOptions { n_mc: *cfg.n_mc.get_or_insert(100_000), seed, method };
    let mut csv = String::from("assertion,belief,plausibility,se_belief,se_plausibility,method\n");
    let mut reports = Vec::new();
    for (text, a) in cfg.assertions.iter().flatten().zip(&assertions) {
        let r = belief(&model, &y, &fam, a, &opts)?;
        let _ = writeln!(
            csv,
            "\"{text}\",{},{},{},{},{:?}",
            sig9(r.belief),
            sig9(r.plausibility),
            sig9(r.se_belief),
            sig9(r.se_plausibility),
            r.method
        );
        reports.push(json!({ "assertion": text, "report": r }));
    }
    let summary = reports
        .iter()
        .map(|r| format!("{}: bel {} pl {}", r["assertion"].as_str().unwrap_or_default(), r["report"]["belief"], r["report"]["plausibility"]))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome { csv, sidecar: json!({ "family": fam.name(), "results": reports }), summary, passed: true })
}

fn cmd_fiducial(cfg: &mut RunConfig) -> Result<Outcome, Failure> {
    let (model, y) = model_of(cfg)?;
    let seed = seed_of(cfg, "fiducial sampling")?;
    let opts = fiducial_options(cfg, seed)?;
    let sample = sample_gfd(&model, &y, &opts)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# seed={}", sample.seed);
    let _ = writeln!(csv, "# epsilon={}", sample.epsilon);
    let _ = writeln!(csv, "# acceptance_rate={}", sig9(sample.acceptance_rate));
    let _ = writeln!(csv, "# tie_rule={}", sample.tie_rule);
    let _ = writeln!(csv, "# norm={}", cfg.norm.as_deref().unwrap_or("l2"));
    csv.push_str(if model.param_dim() == 1 { "theta\n" } else { "theta1,theta2\n" });
    for t in &sample.draws {
        let row: Vec<String> = t.as_slice().iter().map(|v| sig9(*v)).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let assertions = assertions_of(cfg, &model)?;
    let probs: Vec<Value> = cfg
        .assertions
        .iter()
        .flatten()
        .zip(&assertions)
        .map(|(text, a)| {
            let (p, se) = sample.probability(a);
            json!({ "assertion": text, "probability": p, "se": se })
        })
        .collect();
    Ok(Outcome {
        csv,
        sidecar: json!({
            "acceptance_rate": sample.acceptance_rate,
            "proposals": sample.proposals,
            "draws": sample.draws.len(),
            "tie_rule": sample.tie_rule,
            "probabilities": probs,
        }),
        summary: format!("{} draws, acceptance rate {}", sample.draws.len(), sig9(sample.acceptance_rate)),
        passed: true,
    })
}

fn cmd_validate(cfg: &mut RunConfig) -> Result<Outcome, Failure> {
    let model = model_only(cfg)?;
    let seed = seed_of(cfg, "validation")?;
    let theta0 = cfg.theta0.get_or_insert_with(|| vec![0.0; model.param_dim()]).clone();
    let theta0 = Point::from_slice(&theta0)
        .filter(|t| t.dim() == model.param_dim())
        .ok_or_else(|| usage(format!("--theta0 needs {} values", model.param_dim())))?;
    let alphas = cfg.levels.get_or_insert_with(|| (1..20).map(|j| j as f64 / 20.0).collect()).clone();
    let n_rep = *cfg.n_rep.get_or_insert(10_000);
    let n_mc = *cfg.n_mc.get_or_insert(100_000);
    let assertions = assertions_of(cfg, &model)?;

    let mut passed = true;
    let mut sidecar = serde_json::Map::new();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let fam = if model.param_dim() == 1 { Some(family_of(cfg, &model)?) } else { None };

    if let Some(fam) = &fam {
        let v = check_validity_condition(fam, &model.aux(), n_mc, &alphas, seed);
        passed &= v.valid();
        columns.push(("gamma_law".into(), v.rows.iter().map(|r| r.estimate).collect()));
        sidecar.insert("validity_condition".into(), json!(v));
    }

    // one-point grid at θ0; coverage only reads the curve there
    let (m2, fam2, functional) = (model.clone(), fam.clone(), cfg.functional.clone());
    let t0 = if model.param_dim() == 2 {
        let f: Functional = functional
            .as_deref()
            .ok_or_else(|| usage("two-normal validation needs --functional"))?
            .parse()
            .map_err(as_usage)?;
        match f {
            Functional::MuX => theta0.get(0),
            Functional::MuY => theta0.get(1),
            Functional::Ratio => theta0.get(0) / theta0.get(1),
        }
    } else {
        theta0.x()
    };
    let builder = move |y: &Point| -> crate::Result<ConfidenceCurve> {
        match &fam2 {
            Some(f) => cc_from_im(&m2, y, f, vec![t0]),
            None => two_normal_curve(functional.as_deref().unwrap_or("ratio").parse()?, y.get(0), y.get(1), vec![t0]),
        }
    };
    let target = if model.param_dim() == 2 { Point::scalar(t0) } else { theta0 };
    let coverage = coverage_for(&model, &theta0, &target, &builder, n_rep, &alphas, seed)?;
    passed &= coverage.passed();
    columns.push(("coverage".into(), coverage.empirical.clone()));
    columns.push(("coverage_se".into(), coverage.se.clone()));
    sidecar.insert("coverage".into(), json!(coverage));

    let mut beliefs = Vec::new();
    if let Some(fam) = &fam {
        for (text, a) in cfg.assertions.iter().flatten().zip(&assertions) {
            let r = if model.is_discrete() {
                belief_validity_exact(&model, &theta0, fam, a, &alphas)
            } else {
                belief_validity_sim(&model, &theta0, fam, a, n_rep, &alphas, seed)
            }
            .map_err(|e| match e {
                ImError::ThetaInAssertion(_) => usage(e.to_string()),
                e => Failure::Runtime(e),
            })?;
            passed &= r.passed();
            columns.push((format!("belief {text}"), r.empirical.clone()));
            beliefs.push(json!({ "assertion": text, "report": r }));
        }
    }
    sidecar.insert("belief_validity".into(), json!(beliefs));
    sidecar.insert("passed".into(), json!(passed));

    let mut csv = String::from("alpha");
    for (name, _) in &columns {
        let _ = write!(csv, ",\"{name}\"");
    }
    csv.push('\n');
    for (i, a) in alphas.iter().enumerate() {
        csv.push_str(&sig9(*a));
        for (_, col) in &columns {
            let _ = write!(csv, ",{}", sig9(col[i]));
        }
        csv.push('\n');
    }
    Ok(Outcome {
        csv,
        sidecar: Value::Object(sidecar),
        summary: format!("{} over {} levels", if passed { "all verdicts pass" } else { "VERDICT FAILURE" }, alphas.len()),
        passed,
    })
}

// Coverage is simulated at the model's θ0 and read at the curve's target.
fn coverage_for(
    model: &Model,
    theta0: &Point,
    target: &Point,
    builder: &(dyn Fn(&Point) -> crate::Result<ConfidenceCurve> + Sync),
    n_rep: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<crate::validate::CoverageReport, Failure> {
    if target == theta0 {
        return Ok(cc_coverage_sim(model, theta0, builder, n_rep, alphas, seed)?);
    }
    // the curve is over a functional: evaluate it at the functional's value
    let t = target.x();
    let shifted = move |y: &Point| -> crate::Result<ConfidenceCurve> {
        let cc = builder(y)?;
        let (kind, prov) = (cc.kind(), cc.provenance());
        ConfidenceCurve::new(vec![0.0], move |_| cc.evaluate(t), kind, prov)
    };
    let mut r = cc_coverage_sim(model, theta0, &shifted, n_rep, alphas, seed)?;
    r.quantity = format!("P(cc_Y({t}) < alpha)");
    Ok(r)
}

fn cmd_oracle(cfg: &mut RunConfig) -> Result<Outcome, Failure> {
    let (model, y) = model_of(cfg)?;
    let crate::model::AuxDistribution::DiscreteUniform(n) = model.aux() else {
        return Err(usage("the oracle needs a discrete model"));
    };
    let names = match &cfg.randomset {
        Some(s) => s.split(',').map(str::trim).map(String::from).collect(),
        None => vec!["left".to_string(), "right".into(), "two-sided".into(), "offset".into()],
    };
    cfg.randomset = Some(names.join(","));
    let fams: Vec<NestedFamily> = names.iter().map(|s| builtin_discrete(s, n).map_err(as_usage)).collect::<Result<_, _>>()?;
    let window: Vec<i64> = match &cfg.window {
        Some(w) if w.len() == 2 && w[0] <= w[1] => (w[0].ceil() as i64..=w[1].floor() as i64).collect(),
        Some(_) => return Err(usage("--window takes two values LO <= HI")),
        None => support_window(&model, &y)?,
    };
    cfg.window = Some(vec![window[0] as f64, window[window.len() - 1] as f64]);
    let oracle = if window.len() > MAX_WINDOW {
        let seed = seed_of(cfg, "windows wider than 12 points")?;
        build_oracle_sampled(&model, &y, &fams, &window, seed)?
    } else {
        build_oracle(&model, &y, &fams, &window)?
    };
    let report = check_theorems(&oracle)?;
    let mut csv = String::from("family,assertion,bel,pl,fid\n");
    for t in &oracle.tables {
        for r in &t.rows {
            let set = IntSet::finite(r.assertion.iter().copied());
            let _ = writeln!(csv, "{},\"{set}\",{},{},{}", t.family, r.bel, r.pl, r.fid);
        }
    }
    let violations = report.violations();
    Ok(Outcome {
        csv,
        summary: format!(
            "{} families, {} assertions each, {violations} theorem violations",
            oracle.tables.len(),
            oracle.tables.first().map_or(0, |t| t.rows.len())
        ),
        sidecar: json!({ "tables": oracle.tables, "theorems": report, "violations": violations }),
        passed: violations == 0,
    })
}
