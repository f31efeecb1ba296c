//! Command-line front end. Exit codes: 0 success, 1 solver failure or fail verdict,
//! 2 bad usage or input, 3 pipeline non-termination.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::curves::families::{bulge, wiggle};
use crate::curves::{omega_curve, Curve, DEFAULT_GRID};
use crate::error::Error;
use crate::pipeline::{run_pipeline, PipelineConfig, STAGE_CAP};
use crate::profiles::{make_profile, Profile, ProfileSpec};
use crate::sturm::spectrum::{assemble_spectrum, spectrum_csv};
use crate::sturm::{eigenvalue, solve_one, SlSystem};
use crate::verify::{random_generatrix, run_campaign, summarize, summary_csv, CampaignConfig, Roughness, Verdict};
use crate::Fixed;

/// Environment variable overriding the default grid size.
pub const GRID_ENV: &str = "MERIDIAN_GRID";

#[derive(Debug, Parser)]
#[command(name = "meridian", version, about = "Weighted Sturm-Liouville eigenvalues of generatrix curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One eigenvalue lambda_{k,n} with its Richardson error estimate.
    Eig(EigArgs),
    /// Eigenvalue table over k = 0..=k_max, n = 1..=n_max.
    Spectrum(SpectrumArgs),
    /// Run the flattening pipeline and write the trace plus stage curves.
    Flatten(FlattenArgs),
    /// Seeded campaign comparing random generatrices against omega.
    Verify(VerifyArgs),
    /// Write a curve as JSON or CSV.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// `annulus`, `helicoid`, or a profile JSON file.
    #[arg(long, default_value = "annulus")]
    pub profile: String,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// Segments per curve (default: $MERIDIAN_GRID or 2048).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// `omega`, `bulge`, `wiggle`, `random`, or a curve JSON file.
    #[arg(long, default_value = "omega")]
    pub curve: String,
    /// Family amplitude (bulge 0.5, wiggle 0.1, random 0.3 by default).
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub waves: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the eigenfunction as CSV `t,phi`.
    #[arg(long)]
    pub eigenfunction: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, default_value_t = 3)]
    pub k_max: u32,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlattenArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value = "flatten_out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = STAGE_CAP)]
    pub stage_cap: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub k_list: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Largest excursion of random curves, as a fraction of r1 - r2.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// JSON-lines report (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV summary (default: stderr).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub fault_bias: f64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("{0} fail verdicts")]
    Verdicts(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(Error::NonTermination { .. }) => 3,
            CliError::Solver(_) | CliError::Verdicts(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` (including the program name), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("meridian: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Eig(a) => cmd_eig(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Flatten(a) => cmd_flatten(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
    }
}

fn grid(g: &GeometryArgs) -> CliResult<usize> {
    let n = match g.grid {
        Some(n) => n,
        None => match std::env::var(GRID_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| usage(format!("{GRID_ENV}={s:?} is not a grid size")))?,
            Err(_) => DEFAULT_GRID,
        },
    };
    if n < 8 {
        return Err(usage(format!("grid {n} is too small (need at least 8 segments)")));
    }
    Ok(n)
}

fn load_profile(g: &GeometryArgs) -> CliResult<Profile> {
    let mut spec = match g.profile.as_str() {
        "annulus" => ProfileSpec::annulus(2.0, 1.0),
        "helicoid" => ProfileSpec::helicoid(2.0, 0.0),
        path => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("profile {path}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("profile {path}: {e}")))?
        }
    };
    if let Some(r1) = g.r1 {
        spec.r1 = r1;
    }
    if let Some(r2) = g.r2 {
        spec.r2 = r2;
    }
    make_profile(&spec).map_err(usage)
}

fn load_curve(c: &CurveArgs, profile: &Profile, n: usize) -> CliResult<Curve> {
    let bd = &profile.boundary;
    let m = &profile.metric;
    let curve = match c.curve.as_str() {
        "omega" => omega_curve(bd, n),
        "bulge" => bulge(bd, m, c.amplitude.unwrap_or(0.5), n),
        "wiggle" => wiggle(bd, m, c.amplitude.unwrap_or(0.1), c.waves, n),
        "random" => {
            let roughness = Roughness {
                amplitude: c.amplitude.unwrap_or(Roughness::default().amplitude),
                ..Roughness::default()
            };
            random_generatrix(c.seed, bd, m, &roughness, n)
        }
        path => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("curve {path}: {e}")))?;
            let curve: Curve = serde_json::from_str(&text).map_err(|e| usage(format!("curve {path}: {e}")))?;
            curve
                .check_generatrix(bd)
                .map_err(|e| usage(format!("curve {path}: {e}")))?;
            return Ok(curve);
        }
    };
    curve.map_err(usage)
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Error::from)?;
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> CliResult<()> {
    fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))
}

#[derive(Serialize)]
struct EigOutput {
    k: Fixed,
    n: usize,
    grid: usize,
    /// On the doubled grid; the error estimate refers to this value.
    lambda: Fixed,
    lambda_coarse: Fixed,
    error_estimate: Fixed,
}

fn cmd_eig(a: &EigArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if !(a.k.is_finite() && a.k >= 0.0) {
        return Err(usage("--k must be a non-negative number"));
    }
    let profile = load_profile(&a.geometry)?;
    let n = grid(&a.geometry)?;
    let curve = load_curve(&a.curve, &profile, n)?;
    let sys = SlSystem::from_curve(&curve, &profile.weight, &profile.metric, a.k)?;
    let fine = SlSystem::from_curve(&curve.refine(2), &profile.weight, &profile.metric, a.k)?;
    let pair = solve_one(&sys, a.n)?;
    let lambda = eigenvalue(&fine, a.n)?;
    let err = (pair.lambda - lambda).abs() / 3.0;
    if let Some(p) = &a.eigenfunction {
        write_file(p, &pair.to_csv())?;
    }
    let text = match a.format {
        Format::Json => {
            let doc = EigOutput {
                k: Fixed(a.k),
                n: a.n,
                grid: curve.segments(),
                lambda: Fixed(lambda),
                lambda_coarse: Fixed(pair.lambda),
                error_estimate: Fixed(err),
            };
            serde_json::to_string(&doc).map_err(Error::from)? + "\n"
        }
        Format::Csv => format!(
            "k,n,grid,lambda,lambda_coarse,error_estimate\n{},{},{},{},{},{}\n",
            a.k,
            a.n,
            curve.segments(),
            crate::fmt_f64(lambda),
            crate::fmt_f64(pair.lambda),
            crate::fmt_f64(err)
        ),
    };
    emit(a.output.as_deref(), &text)
}

fn cmd_spectrum(a: &SpectrumArgs) -> CliResult<()> {
    if a.n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    let profile = load_profile(&a.geometry)?;
    let n = grid(&a.geometry)?;
    let curve = load_curve(&a.curve, &profile, n)?;
    let table = assemble_spectrum(&curve, &profile, a.k_max, a.n_max)?;
    emit(a.output.as_deref(), &spectrum_csv(&table))
}

fn cmd_flatten(a: &FlattenArgs) -> CliResult<()> {
    if a.stage_cap == 0 {
        return Err(usage("--stage-cap must be at least 1"));
    }
    let profile = load_profile(&a.geometry)?;
    let n = grid(&a.geometry)?;
    let alpha = load_curve(&a.curve, &profile, n)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| usage(format!("{}: {e}", a.out_dir.display())))?;
    let cfg = PipelineConfig {
        grid: n,
        stage_cap: a.stage_cap,
    };
    let (trace, outcome) = match run_pipeline(&alpha, a.k, &profile, &cfg) {
        Ok(tr) => (tr, Ok(())),
        Err(Error::NonTermination { stalled_mu, trace }) => {
            let partial = (*trace).clone();
            (partial, Err(Error::NonTermination { stalled_mu, trace }.into()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut files = Vec::with_capacity(trace.stages.len());
    for s in &trace.stages {
        let name = format!("stage_{:03}.csv", s.m);
        write_file(&a.out_dir.join(&name), &s.curve.to_csv())?;
        files.push(name);
    }
    write_file(&a.out_dir.join("trace.json"), &(trace.to_json(&files) + "\n"))?;
    println!(
        "{} stages, terminal {}, lambda {} (omega {}), trace {}",
        trace.stages.len(),
        trace.terminal,
        crate::fmt_f64(trace.lambdas().last().copied().unwrap_or(f64::NAN)),
        crate::fmt_f64(trace.lambda_omega),
        a.out_dir.join("trace.json").display()
    );
    outcome
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    if a.n_max == 0 || a.seeds == 0 || a.k_list.is_empty() {
        return Err(usage("--seeds, --n-max and --k-list must be non-empty"));
    }
    if a.k_list.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
        return Err(usage("--k-list entries must be non-negative numbers"));
    }
    let profile = load_profile(&a.geometry)?;
    let mut cfg = CampaignConfig::new(profile);
    cfg.grid = grid(&a.geometry)?;
    cfg.seeds = a.seeds;
    cfg.first_seed = a.first_seed;
    cfg.ks = a.k_list.clone();
    cfg.n_max = a.n_max;
    cfg.fault_bias = a.fault_bias;
    if let Some(amp) = a.amplitude {
        cfg.roughness.amplitude = amp;
    }
    let reports = run_campaign(&cfg)?;
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&r.to_json_line());
        lines.push('\n');
    }
    emit(a.report.as_deref(), &lines)?;
    let csv = summary_csv(&summarize(&reports));
    match &a.summary {
        Some(p) => write_file(p, &csv)?,
        None => eprint!("{csv}"),
    }
    let fails = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    if fails > 0 {
        return Err(CliError::Verdicts(fails));
    }
    Ok(())
}

fn cmd_export(a: &ExportArgs) -> CliResult<()> {
    let profile = load_profile(&a.geometry)?;
    let n = grid(&a.geometry)?;
    let curve = load_curve(&a.curve, &profile, n)?;
    let text = match a.format {
        Format::Json => curve.to_json() + "\n",
        Format::Csv => curve.to_csv(),
    };
    emit(a.output.as_deref(), &text)
}
