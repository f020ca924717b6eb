//! Command-line front end. Every command can write its data files plus a
//! `manifest.json` into `--out`; without `--out` the primary table goes to
//! stdout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    asymptotic_curve, asymptotic_curve_csv, bound_region, bound_region_strided, coherent_information, BoundKind,
    CodeParams, RegionCurve,
};
use crate::montecarlo::{
    failure_rate_sweep, failures_csv, sweep_csv, trials_csv, trials_jsonl, BaseCode, Experiment, SamplingMode,
    TrialConfig,
};
use crate::stabilizer::{verify_located_unlocated_equivalence, EquivalenceReport, DEFAULT_ENUMERATION_CAP};
use crate::Error;

pub const THREADS_ENV: &str = "QECBOUND_THREADS";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Boundary overlays sample at most about this many `t_u` values.
const OVERLAY_POINTS: usize = 2000;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REFUSED: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "qecbound", version, about = "Located/unlocated error bounds and decoding experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "kebab-case")]
pub enum Command {
    /// Boundary of the admissible (t_u, t_l) region for one or more n.
    BoundsRegion(BoundsRegionArgs),
    /// Asymptotic (q, p) boundary at a fixed rate.
    Asymptotic(AsymptoticArgs),
    /// Coherent information of the mixed located/unlocated channel.
    CoherentInfo(CoherentInfoArgs),
    /// Exhaustive check that t unlocated errors are correctable iff
    /// 2m located plus t - m unlocated errors are.
    Verify(VerifyArgs),
    /// Random (t_u, t_l) trials on a concatenated code.
    Scatter(ScatterArgs),
    /// Failure rates with confidence intervals at fixed (t_u, t_l) points.
    Sweep(SweepArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BoundsRegion(_) => "bounds-region",
            Command::Asymptotic(_) => "asymptotic",
            Command::CoherentInfo(_) => "coherent-info",
            Command::Verify(_) => "verify",
            Command::Scatter(_) => "scatter",
            Command::Sweep(_) => "sweep",
            Command::Rerun(_) => "rerun",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Original,
    Generalized,
    Tighter,
    Combined,
}

impl From<KindArg> for BoundKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Original => BoundKind::Original,
            KindArg::Generalized => BoundKind::Generalized,
            KindArg::Tighter => BoundKind::Tighter,
            KindArg::Combined => BoundKind::Combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeArg {
    Five,
    Steane,
}

impl From<CodeArg> for BaseCode {
    fn from(c: CodeArg) -> Self {
        match c {
            CodeArg::Five => BaseCode::Five,
            CodeArg::Steane => BaseCode::Steane,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsRegionArgs {
    /// Block length; repeat for several curves.
    #[arg(long = "n", required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Generalized)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AsymptoticArgs {
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.001)]
    pub q_step: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoherentInfoArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub code: CodeArg,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub m: usize,
    /// Maximum number of operators enumerated before refusing.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScatterArgs {
    #[arg(long, value_enum, default_value_t = CodeArg::Five)]
    pub code: CodeArg,
    /// Concatenation levels.
    #[arg(long = "L", visible_alias = "levels", default_value_t = 1)]
    pub levels: u32,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.4)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub q_min: f64,
    #[arg(long, default_value_t = 0.7)]
    pub q_max: f64,
    /// Decoder unlocated rate; defaults to each trial's realized rate.
    #[arg(long)]
    pub p_dec: Option<f64>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, env = THREADS_ENV)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Allow more than 6 levels.
    #[arg(long)]
    pub large_scale: bool,
    #[arg(long, value_enum, default_value_t = TrialFormat::Csv)]
    pub format: TrialFormat,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = CodeArg::Five)]
    pub code: CodeArg,
    #[arg(long = "L", visible_alias = "levels", default_value_t = 1)]
    pub levels: u32,
    /// A point `t_u,t_l`; repeatable.
    #[arg(long = "point", value_parser = parse_point)]
    pub points: Vec<(usize, usize)>,
    /// Grid of `t_u` values as `start:step:end`, crossed with `--t-l-grid`.
    #[arg(long, value_parser = parse_range, requires = "t_l_grid")]
    pub t_u_grid: Option<(usize, usize, usize)>,
    #[arg(long, value_parser = parse_range, requires = "t_u_grid")]
    pub t_l_grid: Option<(usize, usize, usize)>,
    #[arg(long, default_value_t = 1000)]
    pub trials_per_point: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub p_dec: Option<f64>,
    #[arg(long, env = THREADS_ENV)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub large_scale: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    pub fn all_points(&self) -> Vec<(usize, usize)> {
        let mut pts = self.points.clone();
        if let (Some(u), Some(l)) = (self.t_u_grid, self.t_l_grid) {
            for t_u in range_values(u) {
                for t_l in range_values(l) {
                    pts.push((t_u, t_l));
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

fn parse_point(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected t_u,t_l, got {s:?}"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:step:end, got {s:?}"));
    }
    let v: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v[1] == 0 {
        return Err("grid step must be positive".into());
    }
    Ok((v[0], v[1], v[2]))
}

fn range_values((start, step, end): (usize, usize, usize)) -> impl Iterator<Item = usize> {
    (start..=end).step_by(step)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("equivalence check failed: {0:?}")]
    NotEquivalent(EquivalenceReport),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => 1,
            CliError::NotEquivalent(_) => EXIT_INTERNAL,
            CliError::Core(e) => match e {
                Error::EnumerationCap { .. } => EXIT_REFUSED,
                Error::Contradiction => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    /// File name to hex SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn command(&self) -> CliResult<Command> {
        let tagged = serde_json::json!({ "command": self.command, "config": self.config });
        serde_json::from_value(tagged).map_err(|e| CliError::Usage(format!("unreadable manifest: {e}")))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Named output tables produced by a command.
struct Outputs {
    files: Vec<(String, String)>,
    /// Index of the table echoed to stdout when no directory is given.
    primary: usize,
}

impl Outputs {
    fn single(name: impl Into<String>, body: String) -> Self {
        Outputs { files: vec![(name.into(), body)], primary: 0 }
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> CliResult<()> {
    if let Command::Rerun(args) = command {
        return rerun(args);
    }
    let started_at = chrono::Utc::now().to_rfc3339();
    let (outputs, out) = match &command {
        Command::BoundsRegion(a) => (bounds_region(a)?, a.out.clone()),
        Command::Asymptotic(a) => (asymptotic(a)?, a.out.clone()),
        Command::CoherentInfo(a) => (coherent_info(a)?, None),
        Command::Verify(a) => {
            let (outputs, report) = verify(a)?;
            emit(&command, outputs, a.out.as_deref(), &started_at)?;
            return if report.equivalent() { Ok(()) } else { Err(CliError::NotEquivalent(report)) };
        }
        Command::Scatter(a) => (with_threads(a.threads, || scatter(a))?, a.out.clone()),
        Command::Sweep(a) => (with_threads(a.threads, || sweep(a))?, a.out.clone()),
        Command::Rerun(_) => unreachable!(),
    };
    emit(&command, outputs, out.as_deref(), &started_at)
}

fn rerun(args: RerunArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.manifest).map_err(|source| CliError::Io {
        path: args.manifest.clone(),
        source,
    })?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("unreadable manifest: {e}")))?;
    let mut command = manifest.command()?;
    match &mut command {
        Command::BoundsRegion(a) => a.out = args.out,
        Command::Asymptotic(a) => a.out = args.out,
        Command::Verify(a) => a.out = args.out,
        Command::Scatter(a) => {
            a.out = args.out;
            a.threads = args.threads;
        }
        Command::Sweep(a) => {
            a.out = args.out;
            a.threads = args.threads;
        }
        Command::CoherentInfo(_) => {}
        Command::Rerun(_) => return Err(CliError::Usage("manifest cannot record a rerun".into())),
    }
    run(command)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    let threads = match threads {
        Some(0) => return Err(CliError::Usage("thread count must be positive".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(f)
}

fn emit(command: &Command, outputs: Outputs, out: Option<&Path>, started_at: &str) -> CliResult<()> {
    let Some(dir) = out else {
        print!("{}", outputs.files[outputs.primary].1);
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut digests = BTreeMap::new();
    for (name, body) in &outputs.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })?;
        digests.insert(name.clone(), sha256_hex(body.as_bytes()));
    }
    let tagged = serde_json::to_value(command).expect("arguments always serialize");
    let manifest = RunManifest {
        command: command.name().to_string(),
        config: tagged["config"].clone(),
        seed: match command {
            Command::Scatter(a) => Some(a.seed),
            Command::Sweep(a) => Some(a.seed),
            _ => None,
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_at: started_at.to_string(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs: digests,
    };
    let path = dir.join(MANIFEST_FILE);
    let body = serde_json::to_string_pretty(&manifest).expect("manifest always serializes") + "\n";
    std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })
}

fn bounds_region(a: &BoundsRegionArgs) -> CliResult<Outputs> {
    let kind = BoundKind::from(a.kind);
    let mut curves = Vec::with_capacity(a.n.len());
    for &n in &a.n {
        curves.push((n, bound_region(CodeParams::new(n, a.k)?, kind)?));
    }
    let ext = match a.format {
        TableFormat::Csv => "csv",
        TableFormat::Json => "json",
    };
    let mut files: Vec<(String, String)> = curves
        .iter()
        .map(|(n, c)| {
            let body = match a.format {
                TableFormat::Csv => c.to_csv(),
                TableFormat::Json => c.to_json() + "\n",
            };
            (format!("region_n{n}.{ext}"), body)
        })
        .collect();
    let combined = match a.format {
        TableFormat::Csv => {
            let mut s = String::from("n,t_u,max_t_l\n");
            for (n, c) in &curves {
                for (t_u, t_l) in &c.points {
                    let _ = writeln!(s, "{n},{t_u},{t_l}");
                }
            }
            s
        }
        TableFormat::Json => {
            let map: BTreeMap<String, &RegionCurve> = curves.iter().map(|(n, c)| (n.to_string(), c)).collect();
            serde_json::to_string(&map).expect("curves always serialize") + "\n"
        }
    };
    files.push((format!("regions.{ext}"), combined));
    let primary = files.len() - 1;
    Ok(Outputs { files, primary })
}

fn asymptotic(a: &AsymptoticArgs) -> CliResult<Outputs> {
    let rows = asymptotic_curve(a.r, a.q_step)?;
    Ok(match a.format {
        TableFormat::Csv => Outputs::single("asymptotic.csv", asymptotic_curve_csv(&rows)),
        TableFormat::Json => {
            let body = serde_json::to_string(&rows).expect("rows always serialize") + "\n";
            Outputs::single("asymptotic.json", body)
        }
    })
}

fn coherent_info(a: &CoherentInfoArgs) -> CliResult<Outputs> {
    let i = coherent_information(a.p, a.q)?;
    Ok(Outputs::single("coherent_info.txt", format!("{i:.15}\n")))
}

fn verify(a: &VerifyArgs) -> CliResult<(Outputs, EquivalenceReport)> {
    let code = BaseCode::from(a.code).code();
    let report = verify_located_unlocated_equivalence(&code, a.t, a.m, a.cap)?;
    let body = match a.format {
        ReportFormat::Text => format!(
            "code: {:?}\nn: {}\nt: {}\nm: {}\nunlocated_correctable: {}\nlocated_correctable: {}\noperators_checked: {}\nequivalent: {}\n",
            a.code,
            code.n(),
            report.t,
            report.m,
            report.unlocated_correctable,
            report.located_correctable,
            report.operators_checked,
            report.equivalent()
        )
        .to_lowercase(),
        ReportFormat::Json => {
            let mut v = serde_json::to_value(&report).expect("report always serializes");
            v["equivalent"] = serde_json::Value::Bool(report.equivalent());
            serde_json::to_string_pretty(&v).expect("report always serializes") + "\n"
        }
    };
    let name = match a.format {
        ReportFormat::Text => "verify.txt",
        ReportFormat::Json => "verify.json",
    };
    Ok((Outputs::single(name, body), report))
}

fn scatter(a: &ScatterArgs) -> CliResult<Outputs> {
    let config = TrialConfig {
        code: a.code.into(),
        levels: a.levels,
        mode: SamplingMode::RateRectangle { p_min: a.p_min, p_max: a.p_max, q_min: a.q_min, q_max: a.q_max },
        trials: a.trials,
        seed: a.seed,
        p_dec: a.p_dec,
        large_scale: a.large_scale,
    };
    let exp = Experiment::new(config)?;
    let records = exp.scatter()?;
    let n = exp.n();
    let trials = match a.format {
        TrialFormat::Csv => ("trials.csv".to_string(), trials_csv(&records)),
        TrialFormat::Jsonl => ("trials.jsonl".to_string(), trials_jsonl(&records)),
    };
    let params = CodeParams::new(n, exp.code().base().k())?;
    let step = n.div_ceil(OVERLAY_POINTS).max(1);
    let curve = bound_region_strided(params, BoundKind::Generalized, step)?;
    let mut boundary = String::from("t_u,max_t_l,p,q\n");
    for (&(t_u, t_l), (p, q)) in curve.points.iter().zip(curve.to_rates(n)) {
        let _ = writeln!(boundary, "{t_u},{t_l},{p:.6},{q:.6}");
    }
    Ok(Outputs {
        files: vec![trials, ("failures.csv".into(), failures_csv(&records, n)), ("boundary.csv".into(), boundary)],
        primary: 0,
    })
}

fn sweep(a: &SweepArgs) -> CliResult<Outputs> {
    let points = a.all_points();
    if points.is_empty() {
        return Err(CliError::Usage("give at least one --point or a --t-u-grid/--t-l-grid pair".into()));
    }
    let rows =
        failure_rate_sweep(a.code.into(), a.levels, &points, a.trials_per_point, a.seed, a.p_dec, a.large_scale)?;
    Ok(Outputs::single("sweep.csv", sweep_csv(&rows)))
}
