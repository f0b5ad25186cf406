//! `binopt <solve|sweep|generate|validate> <task> [flags]`
//!
//! Exit codes: 0 success, 2 usage, 3 instance error, 4 solver failure.
//! Output goes to `--output`/`--out-dir`, else to `$BINOPT_OUT_DIR`, else to
//! stdout (solve) or the working directory (sweep, generate).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{
    run_trials, summarize, ConfigOverrides, GenParams, InitPolicy, InstanceSource, RunSpec, Summary, TrialRecord,
};
use crate::instances::{beasley, ProblemInstance, Task};
use crate::presets::{MatrixNorm, PresetOptions, ThetaRule};

pub const OUT_DIR_ENV: &str = "BINOPT_OUT_DIR";

/// Version tag written in the first column of every CSV row.
pub const CSV_SCHEMA: &str = "v1";

#[derive(Debug, Parser)]
#[command(name = "binopt", version, about = "Binary optimization via cubic penalty and APPA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance, or `--trials` generated instances.
    Solve(SolveArgs),
    /// Vary one generator parameter over a list of values.
    Sweep(SweepArgs),
    /// Write a generated instance to disk.
    Generate(GenerateArgs),
    /// Re-parse instance files and check their invariants.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Sparsity of the planted signal (recovery).
    #[arg(long)]
    pub s: Option<usize>,
    /// Loss exponent (recovery).
    #[arg(long)]
    pub q: Option<f64>,
    /// Noise factor (recovery).
    #[arg(long)]
    pub nf: Option<f64>,
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Channel correlation r (mimo); 0 means iid.
    #[arg(long)]
    pub corr: Option<f64>,
    /// Synthetic QUBO case 1 to 5.
    #[arg(long = "case")]
    pub case_id: Option<usize>,
}

impl GenArgs {
    pub fn params(&self, task: Task) -> GenParams {
        let mut p = GenParams::defaults_for(task);
        if let Some(v) = self.m {
            p.m = v;
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.s {
            p.s = v;
        }
        if let Some(v) = self.q {
            p.q = v;
        }
        if let Some(v) = self.nf {
            p.nf = v;
        }
        if let Some(v) = self.snr_db {
            p.snr_db = v;
        }
        if let Some(v) = self.corr {
            p.corr = v;
        }
        if let Some(v) = self.case_id {
            p.case_id = v;
        }
        p
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Parameter preset; defaults to the task's own.
    #[arg(long, value_enum)]
    pub preset: Option<Task>,
    #[arg(long, value_enum, default_value_t = MatrixNorm::MaxAbs)]
    pub norm: MatrixNorm,
    #[arg(long = "theta-rule", value_enum, default_value_t = ThetaRule::Safeguarded)]
    pub theta_rule: ThetaRule,
    /// Starting point; zero for most tasks, half for qubo.
    #[arg(long, value_enum)]
    pub init: Option<InitPolicy>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub pi: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub k0: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    #[arg(long = "max-backtracks")]
    pub max_backtracks: Option<usize>,
    /// Wall-clock cap per solve, in seconds.
    #[arg(long = "time-cap")]
    pub time_cap: Option<f64>,
    /// Start each line search one step below the previous one.
    #[arg(long = "warm-start")]
    pub warm_start: bool,
    /// Include wall-clock times in the output (breaks byte-identical reruns).
    #[arg(long = "record-time")]
    pub record_time: bool,
}

impl SolverArgs {
    fn apply(&self, spec: &mut RunSpec) {
        spec.preset = self.preset;
        spec.preset_options = PresetOptions {
            norm: self.norm,
            theta_rule: self.theta_rule,
        };
        spec.init = self.init;
        spec.record_time = self.record_time;
        spec.overrides = ConfigOverrides {
            eta: self.eta,
            alpha: self.alpha,
            sigma: self.sigma,
            lambda0: self.lambda0,
            pi: self.pi,
            theta: self.theta,
            k0: self.k0,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            max_backtracks: self.max_backtracks,
            time_cap_secs: self.time_cap,
            warm_start: self.warm_start,
        };
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(value_enum)]
    pub task: Task,
    /// Native JSON instance or Beasley text file.
    #[arg(long, conflicts_with = "beasley")]
    pub file: Option<PathBuf>,
    /// Named Beasley instance such as bqp100-3.
    #[arg(long)]
    pub beasley: Option<String>,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON-lines output file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    M,
    N,
    S,
    Q,
    Nf,
    SnrDb,
    Corr,
    Case,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::M => "m",
            Axis::N => "n",
            Axis::S => "s",
            Axis::Q => "q",
            Axis::Nf => "nf",
            Axis::SnrDb => "snr-db",
            Axis::Corr => "corr",
            Axis::Case => "case",
        }
    }

    fn set(self, p: &mut GenParams, v: f64) -> Result<()> {
        let int = || -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::param(format!(
                    "axis '{}' needs nonnegative integers, got {v}",
                    self.name()
                )))
            }
        };
        match self {
            Axis::M => p.m = int()?,
            Axis::N => p.n = int()?,
            Axis::S => p.s = int()?,
            Axis::Case => p.case_id = int()?,
            Axis::Q => p.q = v,
            Axis::Nf => p.nf = v,
            Axis::SnrDb => p.snr_db = v,
            Axis::Corr => p.corr = v,
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub task: Task,
    /// Generator parameter to vary.
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    /// Comma-separated values for the axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, required = true)]
    pub seed: u64,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceFormat {
    Native,
    Beasley,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub task: Task,
    #[command(flatten)]
    pub gen: GenArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InstanceFormat::Native)]
    pub format: InstanceFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    pub task: Task,
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

/// Maps an error to its exit status.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) | Error::Capability(_) => 2,
        Error::Parse { .. } | Error::Instance(_) | Error::Io(_) | Error::Json(_) | Error::Dimension { .. } => 3,
        _ => 4,
    }
}

fn out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::from(e).with_path(parent))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::from(e).with_path(path))?,
    ))
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a Summary,
}

/// Records followed by a `{"summary": …}` line.
pub fn write_jsonl(records: &[TrialRecord], summary: &Summary, mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut w, &SummaryLine { summary })?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn human_summary(s: &Summary) -> String {
    let mut parts = vec![format!("{} trials={}", s.task, s.trials)];
    let mut push = |name: &str, st: &Option<crate::experiment::Stat>| {
        if let Some(st) = st {
            parts.push(format!(
                "{name} median={:.6} mean={:.6} best={:.6}",
                st.median, st.mean, st.best
            ));
        }
    };
    push("objective", &s.objective);
    push("acc", &s.accuracy);
    push("ber", &s.ber);
    push("gap%", &s.gap_percent);
    push("iters", &s.iterations);
    parts.push(format!(
        "binary={:.3} stopped={:.3}",
        s.binary_fraction, s.stopping_rule_fraction
    ));
    parts.join(" | ")
}

pub fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let source = match (&a.file, &a.beasley) {
        (Some(path), _) => InstanceSource::File { path: path.clone() },
        (None, Some(name)) => InstanceSource::Beasley { name: name.clone() },
        (None, None) => InstanceSource::Generate(a.gen.params(a.task)),
    };
    let mut spec = RunSpec::new(a.task, source, a.trials, a.seed);
    a.solver.apply(&mut spec);
    let records = run_trials(&spec)?;
    let summary = summarize(a.task, &records);

    let target = a.output.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("solve-{}-seed{}.jsonl", a.task, a.seed)))
    });
    match target {
        Some(path) => write_jsonl(&records, &summary, create(&path)?)?,
        None => write_jsonl(&records, &summary, std::io::stdout().lock())?,
    }
    eprintln!("{}", human_summary(&summary));
    Ok(())
}

const TRIAL_COLUMNS: [&str; 17] = [
    "schema",
    "task",
    "axis",
    "value",
    "trial",
    "seed",
    "n",
    "objective",
    "accuracy",
    "ber",
    "gap_percent",
    "iterations",
    "terminated_by",
    "is_binary",
    "stationarity_residual",
    "final_lambda",
    "wall_time_secs",
];

const SUMMARY_COLUMNS: [&str; 15] = [
    "schema",
    "task",
    "axis",
    "value",
    "trials",
    "median_objective",
    "median_accuracy",
    "mean_accuracy",
    "median_ber",
    "mean_ber",
    "median_gap_percent",
    "mean_gap_percent",
    "median_iterations",
    "binary_fraction",
    "stopping_rule_fraction",
];

pub fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let axis = a.axis.ok_or_else(|| Error::param("sweep needs --axis and --values"))?;
    if a.values.is_empty() {
        return Err(Error::param("sweep needs at least one value in --values"));
    }
    let dir = out_dir(a.out_dir.as_deref());
    let stem = format!("sweep-{}-{}", a.task, axis.name());
    let mut trials_csv = csv::Writer::from_writer(create(&dir.join(format!("{stem}.trials.csv")))?);
    let mut summary_csv = csv::Writer::from_writer(create(&dir.join(format!("{stem}.summary.csv")))?);
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    trials_csv.write_record(TRIAL_COLUMNS).map_err(csv_err)?;
    summary_csv.write_record(SUMMARY_COLUMNS).map_err(csv_err)?;

    let base = a.gen.params(a.task);
    for &value in &a.values {
        let mut params = base.clone();
        axis.set(&mut params, value)?;
        let mut spec = RunSpec::generated(a.task, params, a.trials, a.seed);
        a.solver.apply(&mut spec);
        let records = run_trials(&spec)?;
        for r in &records {
            let wall = if a.solver.record_time {
                format!("{}", r.report.wall_time_secs)
            } else {
                String::new()
            };
            trials_csv
                .write_record([
                    CSV_SCHEMA.to_string(),
                    a.task.to_string(),
                    axis.name().to_string(),
                    format!("{value}"),
                    r.trial.to_string(),
                    r.seed.to_string(),
                    r.n.to_string(),
                    format!("{}", r.metrics.objective),
                    fmt_opt(r.metrics.accuracy),
                    fmt_opt(r.metrics.ber),
                    fmt_opt(r.metrics.gap_percent),
                    r.report.iterations.to_string(),
                    format!("{:?}", r.report.terminated_by),
                    r.metrics.is_binary.to_string(),
                    format!("{}", r.metrics.stationarity_residual),
                    fmt_opt(r.report.final_lambda()),
                    wall,
                ])
                .map_err(csv_err)?;
        }
        let s = summarize(a.task, &records);
        let median = |st: &Option<crate::experiment::Stat>| fmt_opt(st.map(|x| x.median));
        let mean = |st: &Option<crate::experiment::Stat>| fmt_opt(st.map(|x| x.mean));
        summary_csv
            .write_record([
                CSV_SCHEMA.to_string(),
                a.task.to_string(),
                axis.name().to_string(),
                format!("{value}"),
                s.trials.to_string(),
                median(&s.objective),
                median(&s.accuracy),
                mean(&s.accuracy),
                median(&s.ber),
                mean(&s.ber),
                median(&s.gap_percent),
                mean(&s.gap_percent),
                median(&s.iterations),
                format!("{}", s.binary_fraction),
                format!("{}", s.stopping_rule_fraction),
            ])
            .map_err(csv_err)?;
        eprintln!("{}={value}: {}", axis.name(), human_summary(&s));
    }
    trials_csv.flush()?;
    summary_csv.flush()?;
    eprintln!("wrote {}/{stem}.{{trials,summary}}.csv", dir.display());
    Ok(())
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let inst = a.gen.params(a.task).build(a.task, a.seed)?;
    let ext = match a.format {
        InstanceFormat::Native => "json",
        InstanceFormat::Beasley => "txt",
    };
    let path = a
        .output
        .clone()
        .unwrap_or_else(|| out_dir(None).join(format!("{}-seed{}.{ext}", a.task, a.seed)));
    match (a.format, &inst) {
        (InstanceFormat::Native, _) => {
            let mut w = create(&path)?;
            inst.write_json(&mut w)?;
            w.flush()?;
        }
        (InstanceFormat::Beasley, ProblemInstance::Qubo(q)) => {
            let mut w = create(&path)?;
            beasley::write_beasley(&q.q, &mut w)?;
            w.flush()?;
        }
        (InstanceFormat::Beasley, _) => {
            return Err(Error::param("the Beasley format only holds QUBO instances"));
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_validate(a: &ValidateArgs) -> Result<()> {
    for path in &a.paths {
        let inst = ProblemInstance::load(path)?;
        if inst.task() != a.task {
            return Err(Error::Instance(format!(
                "{} holds a '{}' instance, expected '{}'",
                path.display(),
                inst.task(),
                a.task
            )));
        }
        inst.validate().map_err(|e| e.with_path(path))?;
        println!("ok {} ({} variables)", path.display(), inst.dim());
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Parses `args`, runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
