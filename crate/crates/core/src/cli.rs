//! Command-line front end.
//!
//! Configuration is resolved in layers: built-in defaults, then an optional
//! `--config` file (JSON object or flat `key=value` lines), then flags. The
//! environment variable `HYPERWAVE_TOLERANCE_SCALE` multiplies `rtol` and
//! `atol` last.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::asymptotics::{fit_approach_to_pole, fit_decay_to_center, AsymptoticFit, Scenario};
use crate::error::{Error, Result};
use crate::field::{compatibility_report, sample_field, CompatibilityOptions, FieldSolution, GridSpec};
use crate::io;
use crate::odeint::IntegrationConfig;
use crate::profile::{solve_profile, ConeFamily, SolveOptions};
use crate::regimes::{classify, WaveParameters};
use crate::seed::SeedSpec;
use crate::selfsimilar::{solve_selfsimilar, summarize};
use crate::surface::SurfaceProfile;
use crate::sweep::par_map;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const TOLERANCE_SCALE_VAR: &str = "HYPERWAVE_TOLERANCE_SCALE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    S2,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Selfsim,
    Asym,
    Field,
    Classify,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Horizontal,
    Vertical,
}

impl From<Family> for ConeFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Horizontal => ConeFamily::Horizontal,
            Family::Vertical => ConeFamily::Vertical,
        }
    }
}

/// Fully resolved run configuration; echoed in every summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub target: Target,
    pub mu: f64,
    pub k: f64,
    pub c: f64,
    pub b: f64,
    pub q0: f64,
    pub a_seed: f64,
    pub a_max: f64,
    pub r_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Cone family for `solve`, `selfsim`, `asym` and `validate`.
    pub family: Family,
    /// `field` assembles the self-similar solution instead of the standing wave.
    pub selfsimilar: bool,
    pub grid: GridSpec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cfg = IntegrationConfig::<f64>::default();
        RunConfig {
            mode: Mode::Solve,
            target: Target::S2,
            mu: -1.0,
            k: 1.0,
            c: 1.0,
            b: -3.0,
            q0: 0.1,
            a_seed: SeedSpec::<f64>::new(0.1).a_seed,
            a_max: 500.0,
            r_max: 100.0,
            rtol: cfg.rtol,
            atol: cfg.atol,
            family: Family::Horizontal,
            selfsimilar: false,
            grid: GridSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [self.mu, self.k, self.c, self.b, self.q0, self.a_seed, self.a_max, self.r_max, self.rtol, self.atol];
        if reals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("all numeric fields must be finite".into()));
        }
        if !(self.a_seed > 0.0 && self.a_max > self.a_seed && self.r_max > self.a_seed) {
            return Err(Error::Config("need 0 < a_seed < a_max and a_seed < r_max".into()));
        }
        self.grid.validate()?;
        self.integration().validate()
    }

    pub fn params(&self) -> WaveParameters<f64> {
        WaveParameters::new(self.mu, self.k, self.c, self.b)
    }

    pub fn surface(&self) -> SurfaceProfile<f64> {
        match self.target {
            Target::S2 => SurfaceProfile::sphere(),
            Target::H2 => SurfaceProfile::pseudo_sphere(),
        }
    }

    pub fn seed(&self) -> SeedSpec<f64> {
        SeedSpec::new(self.q0).with_a_seed(self.a_seed)
    }

    pub fn integration(&self) -> IntegrationConfig<f64> {
        IntegrationConfig::with_tolerances(self.rtol, self.atol)
    }
}

#[derive(Parser, Debug)]
#[command(name = "hyperwave", version, about = "Equivariant and self-similar standing-wave profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regime classification of (μ, k, c, b).
    Classify(Flags),
    /// Hyperbolic profile from the seed radius to a_max.
    Solve(Flags),
    /// Self-similar profile up to r_max.
    Selfsim(Flags),
    /// Tail classification and asymptotic fit on [a_max/5, a_max].
    Asym(Flags),
    /// Field on a grid plus the compatibility report.
    Field(Flags),
    /// Re-check a profile CSV written by `solve`.
    Validate(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON object or key=value file; a summary file is accepted too.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q0: Option<f64>,
    #[arg(long)]
    a_seed: Option<f64>,
    #[arg(long)]
    a_max: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    selfsimilar: bool,
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ymin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ymax: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Primary output (CSV, or the JSON report for classify/asym/validate).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary with the resolved configuration.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Compatibility report (field).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Input CSV (validate).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Sweep one key over values, e.g. `mu=-1,-0.5`.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_scalar(raw: &str) -> Value {
    let v = raw.trim();
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        if let Some(n) = serde_json::Number::from_f64(x) {
            return Value::Number(n);
        }
    }
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(v.trim_matches('"').to_string()),
    }
}

fn set_key(map: &mut Map<String, Value>, key: &str, value: Value) {
    match key.split_once('.') {
        Some((head, rest)) => {
            let entry = map.entry(head.to_string()).or_insert_with(|| Value::Object(Map::new()));
            if let Value::Object(inner) = entry {
                set_key(inner, rest, value);
            }
        }
        None => {
            map.insert(key.to_string(), value);
        }
    }
}

fn merge(base: &mut Map<String, Value>, over: Map<String, Value>) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Object(b)), Value::Object(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parses a config file: a JSON object (a summary's `config` member is
/// used when present) or `key=value` lines with `#` comments and dotted
/// keys for grid fields.
pub fn parse_config_text(text: &str) -> Result<Map<String, Value>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| Error::Config(format!("config JSON: {e}")))?;
        let Value::Object(mut map) = v else {
            return Err(Error::Config("config JSON must be an object".into()));
        };
        if let Some(Value::Object(inner)) = map.remove("config") {
            return Ok(inner);
        }
        return Ok(map);
    }
    let mut map = Map::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key=value", n + 1)))?;
        set_key(&mut map, k.trim(), parse_scalar(v));
    }
    Ok(map)
}

fn flag_map(f: &Flags) -> Map<String, Value> {
    let mut m = Map::new();
    let reals = [
        ("mu", f.mu),
        ("k", f.k),
        ("c", f.c),
        ("b", f.b),
        ("q0", f.q0),
        ("a_seed", f.a_seed),
        ("a_max", f.a_max),
        ("r_max", f.r_max),
        ("rtol", f.rtol),
        ("atol", f.atol),
        ("grid.xmin", f.xmin),
        ("grid.xmax", f.xmax),
        ("grid.ymin", f.ymin),
        ("grid.ymax", f.ymax),
        ("grid.t", f.t),
    ];
    for (k, v) in reals {
        if let Some(v) = v {
            set_key(&mut m, k, serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number));
        }
    }
    for (k, v) in [("grid.nx", f.nx), ("grid.ny", f.ny)] {
        if let Some(v) = v {
            set_key(&mut m, k, json!(v));
        }
    }
    for (k, v) in [("target", &f.target), ("family", &f.family)] {
        if let Some(v) = v {
            set_key(&mut m, k, Value::String(v.to_lowercase()));
        }
    }
    if f.selfsimilar {
        m.insert("selfsimilar".into(), Value::Bool(true));
    }
    m
}

fn tolerance_scale() -> Result<f64> {
    match std::env::var(TOLERANCE_SCALE_VAR) {
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
            _ => Err(Error::Config(format!("{TOLERANCE_SCALE_VAR} must be a positive number"))),
        },
        Err(_) => Ok(1.0),
    }
}

fn finish(map: Map<String, Value>, scale: f64) -> Result<RunConfig> {
    let mut cfg: RunConfig =
        serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(format!("config: {e}")))?;
    cfg.rtol *= scale;
    cfg.atol *= scale;
    cfg.validate()?;
    Ok(cfg)
}

fn layered(mode: Mode, flags: &Flags) -> Result<Map<String, Value>> {
    let Value::Object(mut map) = serde_json::to_value(RunConfig::default()).expect("defaults serialize") else {
        unreachable!()
    };
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        merge(&mut map, parse_config_text(&text)?);
    }
    merge(&mut map, flag_map(flags));
    map.insert("mode".into(), serde_json::to_value(mode).expect("mode serializes"));
    Ok(map)
}

/// Resolves defaults, config file, flags and the tolerance scale.
fn resolve(mode: Mode, flags: &Flags) -> Result<Vec<RunConfig>> {
    let map = layered(mode, flags)?;
    let scale = tolerance_scale()?;
    let Some(spec) = &flags.sweep else {
        return Ok(vec![finish(map, scale)?]);
    };
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config("--sweep expects key=v1,v2,...".into()))?;
    let mut out = Vec::new();
    for raw in values.split(',').filter(|v| !v.trim().is_empty()) {
        let mut m = map.clone();
        set_key(&mut m, key.trim(), parse_scalar(raw));
        out.push(finish(m, scale)?);
    }
    if out.is_empty() {
        return Err(Error::Config("--sweep needs at least one value".into()));
    }
    Ok(out)
}

/// Result of one configuration, held in memory until written.
#[derive(Debug, Clone, Default)]
struct Output {
    csv: Option<Vec<u8>>,
    report: Option<Value>,
    summary: Value,
    /// Names of failed checks (validate).
    failures: Vec<String>,
}

fn to_json<S: Serialize>(v: &S) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn run_classify(cfg: &RunConfig) -> Result<Output> {
    let report = to_json(&classify(&cfg.params())?);
    Ok(Output { summary: json!({ "config": cfg, "report": report }), report: Some(report), ..Output::default() })
}

fn run_solve(cfg: &RunConfig) -> Result<Output> {
    let surface = cfg.surface();
    let traj = solve_profile(
        &surface,
        &cfg.params(),
        &cfg.seed(),
        cfg.a_max,
        &cfg.integration(),
        &SolveOptions::new(cfg.family.into()),
    )?;
    let csv = csv_bytes(|b| io::write_profile_csv(b, &traj))?;
    let summary = json!({
        "config": cfg,
        "kappa": traj.kappa(),
        "termination": traj.termination().to_string(),
        "a_start": traj.a_start(),
        "a_end": traj.a_end(),
        "knots": traj.knots().len(),
        "residuals": to_json(traj.residuals()),
    });
    Ok(Output { csv: Some(csv), summary, ..Output::default() })
}

fn run_selfsim(cfg: &RunConfig) -> Result<Output> {
    let surface = cfg.surface();
    let traj =
        solve_selfsimilar(&surface, &cfg.params(), cfg.family.into(), &cfg.seed(), cfg.r_max, &cfg.integration())?;
    let csv = csv_bytes(|b| io::write_selfsim_csv(b, &traj))?;
    let s = summarize(&traj);
    let summary = json!({
        "config": cfg,
        "s_star": s.s_star,
        "rate": s.rate,
        "s_one": s.s_one,
        "interior_condition": s.interior_condition,
        "max_h_residual": s.max_h_residual,
        "termination": traj.termination().to_string(),
    });
    Ok(Output { csv: Some(csv), summary, ..Output::default() })
}

fn run_asym(cfg: &RunConfig) -> Result<Output> {
    let surface = cfg.surface();
    let family: ConeFamily = cfg.family.into();
    let eff = family.params(&cfg.params());
    let window = (cfg.a_max * 0.2, cfg.a_max);
    let unbounded = !surface.is_compact() && eff.mu > 0.0;
    let opts = SolveOptions::new(family).allow_blowup(unbounded);
    let traj = solve_profile(&surface, &cfg.params(), &cfg.seed(), cfg.a_max, &cfg.integration(), &opts)?;
    let fit = if traj.a_end() < cfg.a_max {
        let nan = f64::NAN;
        let scenario = if unbounded { Scenario::Unbounded } else { Scenario::Undetermined };
        AsymptoticFit { scenario, e_inf: nan, theta0: nan, freq: nan, log_drift: nan, rate_exponent: nan, window }
    } else if eff.mu < 0.0 {
        fit_decay_to_center(&traj, &eff, &surface, window)?
    } else if eff.mu > 0.0 && surface.is_compact() {
        fit_approach_to_pole(&traj, &eff, &surface, window)?
    } else {
        return Err(Error::Regime("no tail fit applies to this configuration".into()));
    };
    let report = to_json(&fit);
    let summary = json!({
        "config": cfg,
        "fit": report,
        "termination": traj.termination().to_string(),
        "a_end": traj.a_end(),
    });
    Ok(Output { report: Some(report), summary, ..Output::default() })
}

fn run_field(cfg: &RunConfig) -> Result<Output> {
    let surface = cfg.surface();
    let params = cfg.params();
    let g = &cfg.grid;
    let mut reach = g.max_radius();
    if cfg.selfsimilar {
        if !(g.t > 0.0) {
            return Err(Error::Config("self-similar fields need grid.t > 0".into()));
        }
        reach /= g.t.sqrt();
    }
    let x_max = (reach * 1.001).max(2.0);
    let field = FieldSolution::solve(&surface, &params, &cfg.seed(), x_max, &cfg.integration(), cfg.selfsimilar)?;
    let grid = sample_field(&field, g)?;
    let csv = csv_bytes(|b| io::write_field_csv(b, &grid))?;
    let kappa = params.kappa().ok_or_else(|| Error::Regime("field assembly needs Case I".into()))?;
    let t = if cfg.selfsimilar { g.t } else { 0.0 };
    let report = to_json(&compatibility_report(&field, t, kappa, &CompatibilityOptions::default())?);
    let summary = json!({
        "config": cfg,
        "x_max": x_max,
        "nodes": grid.nodes.len(),
        "compatibility": report,
    });
    Ok(Output { csv: Some(csv), report: Some(report), summary, ..Output::default() })
}

fn run_validate(cfg: &RunConfig, input: &Path) -> Result<Output> {
    let file = File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let rows = io::read_profile_csv(file)?;
    let family: ConeFamily = cfg.family.into();
    let eff = family.params(&cfg.params());
    let rep = io::validate_profile_rows(&cfg.surface(), &eff, &rows, &cfg.integration())?;
    let failures = rep
        .failures()
        .map(|c| match c.row {
            Some(r) => format!("{} (row {r}, worst {:e}, tol {:e})", c.name, c.worst, c.tol),
            None => c.name.clone(),
        })
        .collect();
    let report = to_json(&rep);
    Ok(Output {
        summary: json!({ "config": cfg, "input": input.display().to_string(), "passed": rep.passed(), "validation": report }),
        report: Some(report),
        failures,
        ..Output::default()
    })
}

fn execute(cfg: &RunConfig, flags: &Flags) -> Result<Output> {
    match cfg.mode {
        Mode::Classify => run_classify(cfg),
        Mode::Solve => run_solve(cfg),
        Mode::Selfsim => run_selfsim(cfg),
        Mode::Asym => run_asym(cfg),
        Mode::Field => run_field(cfg),
        Mode::Validate => {
            let input = flags.input.as_deref().ok_or_else(|| Error::Config("validate needs --in FILE".into()))?;
            run_validate(cfg, input)
        }
    }
}

fn indexed(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{i}"),
    };
    path.with_file_name(name)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?);
    w.write_all(bytes)?;
    w.flush()?;
    Ok(())
}

fn json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    io::write_json(&mut buf, v)?;
    Ok(buf)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_outputs(outputs: &[Output], flags: &Flags, sweep: bool) -> Result<()> {
    let has_csv = outputs.iter().any(|o| o.csv.is_some());
    if has_csv {
        for (i, o) in outputs.iter().enumerate() {
            let Some(csv) = &o.csv else { continue };
            match (&flags.out, sweep) {
                (Some(p), true) => write_file(&indexed(p, i), csv)?,
                (Some(p), false) => write_file(p, csv)?,
                (None, true) => return Err(Error::Config("sweeps writing CSV need --out".into())),
                (None, false) => emit(None, csv)?,
            }
        }
    }
    let collect = |f: &dyn Fn(&Output) -> Option<Value>| -> Option<Value> {
        let vals: Vec<Value> = outputs.iter().filter_map(f).collect();
        match (vals.len(), sweep) {
            (0, _) => None,
            (_, true) => Some(Value::Array(vals)),
            (_, false) => vals.into_iter().next(),
        }
    };
    if let Some(report) = collect(&|o| o.report.clone()) {
        let target = if has_csv { flags.report.as_deref() } else { flags.out.as_deref() };
        if target.is_some() || !has_csv {
            emit(target, &json_bytes(&report)?)?;
        }
    }
    if let Some(path) = &flags.summary {
        if let Some(summary) = collect(&|o| Some(o.summary.clone())) {
            write_file(path, &json_bytes(&summary)?)?;
        }
    }
    Ok(())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Regime(_) | Error::Io(_) => EXIT_CONFIG,
        Error::Integration(_) | Error::Domain(_) | Error::Undetermined(_) => EXIT_FAILURE,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    let (mode, flags) = match command {
        Command::Classify(f) => (Mode::Classify, f),
        Command::Solve(f) => (Mode::Solve, f),
        Command::Selfsim(f) => (Mode::Selfsim, f),
        Command::Asym(f) => (Mode::Asym, f),
        Command::Field(f) => (Mode::Field, f),
        Command::Validate(f) => (Mode::Validate, f),
    };
    let configs = resolve(mode, &flags)?;
    let sweep = flags.sweep.is_some();
    let outputs = par_map(&configs, flags.jobs, |c| execute(c, &flags))?.into_iter().collect::<Result<Vec<_>>>()?;
    write_outputs(&outputs, &flags, sweep)?;
    let failures: Vec<&String> = outputs.iter().flat_map(|o| &o.failures).collect();
    if failures.is_empty() {
        return Ok(EXIT_OK);
    }
    for f in failures {
        eprintln!("validate: failed invariant {f}");
    }
    Ok(EXIT_FAILURE)
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hyperwave: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_config() {
        let m = parse_config_text("# reference\nmu = -1\ntarget=h2\ngrid.nx=64\n").unwrap();
        assert_eq!(m["mu"], json!(-1));
        assert_eq!(m["target"], json!("h2"));
        assert_eq!(m["grid"]["nx"], json!(64));
        assert!(parse_config_text("mu -1").is_err());
    }

    #[test]
    fn summary_files_are_configs() {
        let m = parse_config_text(r#"{"config": {"mu": 2.0}, "kappa": 1}"#).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let flags = Flags::default();
        let mut map = layered(Mode::Solve, &flags).unwrap();
        map.insert("bogus".into(), json!(1));
        assert!(matches!(finish(map, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_paths() {
        assert_eq!(indexed(Path::new("out/traj.csv"), 3), PathBuf::from("out/traj_3.csv"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["hyperwave", "classify", "--bogus", "1"]), EXIT_USAGE);
        assert_eq!(run(["hyperwave", "frobnicate"]), EXIT_USAGE);
    }
}
