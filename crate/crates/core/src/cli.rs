//! `salp` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 IO error, 4 existing
//! manifest without `--force`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algorithms::LeaderRule;
use crate::error::Error;
use crate::harness::{
    bounce_probe, dynamics_probe, load_results, run_experiment, sanitize, shift_invariance_probe, write_results,
    ExperimentConfig, Manifest,
};
use crate::plot::{abf_svg, box_svg, dynamics_svg, DEFAULT_LOG_FLOOR};
use crate::space::Bounds;
use crate::stats::BoxSummary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_EXISTS: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    ManifestExists(PathBuf),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::ManifestExists(_) => EXIT_EXISTS,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::ManifestExists(p) => write!(f, "manifest exists: {} (use --force to overwrite)", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "salp", version, about = "Salp swarm optimizer audits and baselines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment from a JSON config and write a result directory.
    Run(RunArgs),
    /// Run an algorithm on an objective and on its translation with the same
    /// seed, and report the trajectory deviation.
    Compare(CompareArgs),
    /// Record swarm positions on the random-fitness probe.
    Dynamics(DynamicsArgs),
    /// Measure how often leader updates leave a far-from-origin box.
    Bounce(BounceArgs),
    /// Build statistics and plots from a result directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite an existing manifest.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
    /// Override base_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override repetitions.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override any config field, e.g. `--set iterations=50` or
    /// `--set objectives.0.shift=1e9`. Values are parsed as JSON, falling
    /// back to a string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value = "asso")]
    pub algorithm: String,
    #[arg(long, default_value = "sphere")]
    pub objective: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Broadcast shift applied to every coordinate.
    #[arg(long, default_value_t = 1e9)]
    pub shift: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long, default_value = "sso")]
    pub preset: String,
    /// Half-width of the symmetric box [-b, b]^dim.
    #[arg(long, default_value_t = 100.0, conflicts_with_all = ["lower", "upper"])]
    pub bound: f64,
    /// Explicit lower bounds, comma separated.
    #[arg(long, value_delimiter = ',', requires = "upper")]
    pub lower: Option<Vec<f64>>,
    /// Explicit upper bounds, comma separated.
    #[arg(long, value_delimiter = ',', requires = "lower")]
    pub upper: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Number of recorded iterations (also the schedule length).
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Published,
    Amended,
}

#[derive(Debug, Args)]
pub struct BounceArgs {
    /// The box is [10^k, 10^k + 1]^2.
    #[arg(long, short = 'k', allow_negative_numbers = true)]
    pub exponent: f64,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    /// First seed; repetitions use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "published")]
    pub rule: RuleArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result directory written by `run`.
    #[arg(long)]
    pub results: PathBuf,
    /// Where to write reports and plots (defaults to the result directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Log-axis floor for nonpositive fitness values.
    #[arg(long, default_value_t = DEFAULT_LOG_FLOOR)]
    pub floor: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("salp: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run(a) => cmd_run(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Dynamics(a) => cmd_dynamics(&a),
        Command::Bounce(a) => cmd_bounce(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn prepare_out(out: &OutArgs) -> Result<(), CliError> {
    let manifest = out.out.join("manifest.json");
    if manifest.exists() && !out.force {
        return Err(CliError::ManifestExists(manifest));
    }
    fs::create_dir_all(&out.out).map_err(io_err(&out.out))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

/// Sets `path` (dot separated, numeric segments index arrays) in `root`.
fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got \"{assignment}\"")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = root;
    for seg in key.split('.') {
        slot = match slot {
            Value::Array(items) => {
                let i: usize = seg
                    .parse()
                    .map_err(|_| CliError::Config(format!("field \"{key}\": \"{seg}\" is not an array index")))?;
                items.get_mut(i).ok_or_else(|| CliError::Config(format!("field \"{key}\": index {i} out of range")))?
            }
            Value::Object(map) => map.entry(seg.to_string()).or_insert(Value::Null),
            _ => return Err(CliError::Config(format!("field \"{key}\": \"{seg}\" is not an object"))),
        };
    }
    *slot = value;
    Ok(())
}

/// Reads the config, applies overrides, and deserializes with field paths in
/// error messages.
pub fn load_config(path: &Path, overrides: &[String], seed: Option<u64>, reps: Option<usize>) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", path.display())))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    if let Some(obj) = value.as_object_mut() {
        if let Some(s) = seed {
            obj.insert("base_seed".into(), json!(s));
        }
        if let Some(r) = reps {
            obj.insert("repetitions".into(), json!(r));
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        CliError::Config(format!("field \"{field}\": {}", e.inner()))
    })
}

pub fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, &a.set, a.seed, a.reps)?;
    cfg.resolve()?;
    prepare_out(&a.out)?;
    let results = run_experiment(&cfg)?;
    write_results(&results, &a.out.out)?;
    for cell in &results.cells {
        let mut v = cell.final_bests();
        v.sort_by(f64::total_cmp);
        println!("{:<18} {:<28} median final best {:e}", cell.algorithm, cell.objective, v[v.len() / 2]);
    }
    Ok(())
}

pub fn cmd_compare(a: &CompareArgs) -> Result<(), CliError> {
    let shift = vec![a.shift; a.dim];
    let report = shift_invariance_probe(&a.algorithm, &a.objective, a.dim, &shift, a.seed, a.population, a.iterations)?;
    prepare_out(&a.out)?;
    write_file(&a.out.out.join("shift_probe.json"), to_json(&report))?;
    let mut m = Manifest::new("compare", json!({
        "algorithm": a.algorithm, "objective": a.objective, "dim": a.dim, "shift": a.shift,
        "seed": a.seed, "population_size": a.population, "iterations": a.iterations,
    }));
    m.files.push("shift_probe.json".into());
    m.write(&a.out.out)?;
    println!(
        "{} on {} shifted by {:e}: max deviation {:e}, final best {:e} (base) vs {:e} (shifted)",
        a.algorithm, a.objective, a.shift, report.max_deviation, report.base_final, report.shifted_final
    );
    Ok(())
}

pub fn cmd_dynamics(a: &DynamicsArgs) -> Result<(), CliError> {
    let bounds = match (&a.lower, &a.upper) {
        (Some(l), Some(u)) => Bounds::new(l.clone(), u.clone())?,
        _ => Bounds::uniform(a.dim, -a.bound, a.bound)?,
    };
    let report = dynamics_probe(&a.preset, &bounds, a.iterations, a.population, a.seed)?;
    prepare_out(&a.out)?;
    let dir = &a.out.out;
    write_file(&dir.join("snapshots.csv"), crate::harness::persist_snapshot_csv(None, &report.snapshots))?;
    write_file(&dir.join("start.csv"), crate::harness::persist_snapshot_csv(Some(&report.start), &[]))?;
    write_file(&dir.join("dynamics.svg"), dynamics_svg(&report))?;
    let centroids: Vec<f64> = report
        .snapshots
        .iter()
        .map(|f| report.centroid(f).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let summary = json!({
        "preset": report.preset,
        "head_index": report.head_index,
        "centroid_norm_per_iteration": centroids,
        "final_centroid_norm": report.final_centroid_norm(),
        "final_leader_max_abs": report.final_leader_max_abs(),
        "final_max_abs": report.final_max_abs(),
    });
    write_file(&dir.join("dynamics.json"), to_json(&summary))?;
    let mut m = Manifest::new("dynamics", json!({
        "preset": a.preset, "bounds": bounds, "iterations": a.iterations,
        "population_size": a.population, "seed": a.seed, "objective": "random",
    }));
    m.files = ["snapshots.csv", "start.csv", "dynamics.svg", "dynamics.json"].map(String::from).to_vec();
    m.notes.push("start.csv holds post-initialization positions (iteration 0)".into());
    m.write(dir)?;
    println!("{}: final centroid norm {:e}", report.preset, report.final_centroid_norm());
    Ok(())
}

pub fn cmd_bounce(a: &BounceArgs) -> Result<(), CliError> {
    let rule = match a.rule {
        RuleArg::Published => LeaderRule::Published,
        RuleArg::Amended => LeaderRule::Amended,
    };
    if a.reps == 0 {
        return Err(CliError::Config("field \"reps\": must be at least 1".into()));
    }
    let runs = (0..a.reps)
        .map(|r| bounce_probe(a.exponent, a.iterations, a.population, a.seed.wrapping_add(r as u64), rule))
        .collect::<Result<Vec<_>, _>>()?;
    prepare_out(&a.out)?;
    let fractions: Vec<f64> = runs.iter().map(|r| r.fraction).collect();
    let min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    write_file(
        &a.out.out.join("bounce.json"),
        to_json(&json!({ "min_fraction": min, "max_fraction": max, "mean_fraction": mean, "runs": runs })),
    )?;
    let mut m = Manifest::new("bounce", json!({
        "exponent": a.exponent, "iterations": a.iterations, "population_size": a.population,
        "base_seed": a.seed, "repetitions": a.reps, "leader_rule": rule,
    }));
    m.files.push("bounce.json".into());
    m.write(&a.out.out)?;
    println!("k = {}: outside fraction min {min} mean {mean} max {max}", a.exponent);
    Ok(())
}

pub fn cmd_report(a: &ReportArgs) -> Result<(), CliError> {
    let loaded = load_results(&a.results)?;
    let out = a.out.clone().unwrap_or_else(|| a.results.clone());
    fs::create_dir_all(&out).map_err(io_err(&out))?;
    let reports = loaded.reports()?;
    write_file(&out.join("report.json"), to_json(&reports))?;
    for report in &reports {
        let stem = sanitize(&report.objective);
        let mut csv = Vec::new();
        report.write_csv_matrix(&mut csv)?;
        write_file(&out.join(format!("matrix_{stem}.csv")), csv)?;

        let cells: Vec<_> = loaded.cells.iter().filter(|c| c.objective == report.objective).collect();
        let series = cells
            .iter()
            .map(|c| Ok((c.algorithm.clone(), c.abf()?)))
            .collect::<Result<Vec<_>, Error>>()?;
        write_file(&out.join(format!("abf_{stem}.svg")), abf_svg(&report.objective, &series, a.floor))?;
        let boxes: Vec<(String, BoxSummary)> =
            cells.iter().map(|c| (c.algorithm.clone(), BoxSummary::of(&c.final_bests()))).collect();
        write_file(&out.join(format!("box_{stem}.svg")), box_svg(&report.objective, &boxes, Some(report), a.floor))?;

        println!("{}", report.objective);
        for p in &report.pairs {
            println!("  {:<16} vs {:<16} p_adj {:<12.3e} {}", p.a, p.b, p.p_adjusted, p.class);
        }
    }
    Ok(())
}
