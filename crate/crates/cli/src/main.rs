mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use trisum_core::report::{emit_report, Format, VerificationReport};

#[derive(Debug, Parser)]
#[command(name = "trisum", version, about = "Verification toolkit for ternary sums of primes 1 mod 3")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

/// Every flag is global so config files can supply any of them.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Modulus for `verify local`
    #[arg(long, global = true)]
    pub m: Option<u64>,
    /// Sequence length, pipeline target, or cyclic length for `spectrum`
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Sieve level
    #[arg(long, global = true)]
    pub z: Option<u64>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Density margin; defaults to the measured density minus 1/2
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-depth", global = true)]
    pub max_depth: Option<u32>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,
    /// key = value file or JSON object supplying defaults for these flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sieve limit
    #[arg(long, global = true)]
    pub limit: Option<u64>,
    /// Subset rule: all, pattern:Q:C1,.., bernoulli:P:SEED or custom:X1,..
    #[arg(long, global = true)]
    pub rule: Option<String>,
    #[arg(long = "n-lo", global = true)]
    pub n_lo: Option<u64>,
    #[arg(long = "n-hi", global = true)]
    pub n_hi: Option<u64>,
    /// symmetric or asymmetric
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// index-wise or literal hypothesis
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Residue class for `spectrum`
    #[arg(long, global = true)]
    pub b: Option<u64>,
    /// Side file for per-target counts or spectrum magnitudes
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Record wall-clock runtime; reports are otherwise byte-identical across runs
    #[arg(long, global = true)]
    pub timing: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Random search for counterexamples to the sequence inequalities
    LemmaSearch,
    #[command(subcommand)]
    Goldbach(GoldbachCommand),
    /// Fourier diagnostics of the W-trick majorant
    Spectrum,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// {1, 7} in Z_15^* misses 12 (mod 15)
    Sharpness,
    /// Exhaustive and random checks of the local theorem mod m
    Local,
    /// Exact LP table and T-function checks
    Lp,
    /// Interval certification of the eight regions
    Regions,
}

#[derive(Debug, Subcommand)]
pub enum GoldbachCommand {
    /// Representation counts over a target range
    Scan,
    /// The full W-trick reduction on one target
    Pipeline,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{kind}: {message}")]
    Domain { kind: String, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Error variant name followed by its message.
    pub fn domain<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .next()
            .unwrap_or("Error")
            .to_string();
        CliError::Domain {
            kind,
            message: e.to_string(),
        }
    }
}

/// Puts config-derived flags right after the program name.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            path = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let extra = config::to_args(&config::load(path.as_ref())?)?;
    let mut out = vec![argv[0].clone()];
    out.extend(extra);
    out.extend(argv.into_iter().skip(1));
    Ok(out)
}

fn execute(cli: &Cli) -> Result<VerificationReport, CliError> {
    let start = Instant::now();
    let mut report = commands::run(&cli.command, &cli.opts)?;
    if cli.opts.timing {
        report.runtime_ms = start.elapsed().as_millis() as u64;
    }
    Ok(report)
}

fn write_output(opts: &Opts, bytes: &[u8]) -> Result<(), CliError> {
    match &opts.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

pub fn run_command(argv: Vec<String>) -> u8 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let bytes = emit_report(&report, cli.opts.format.unwrap_or_default());
    if let Err(e) = write_output(&cli.opts, &bytes) {
        eprintln!("error: {e}");
        return 2;
    }
    if report.verdict.is_fail() {
        eprintln!("verdict: fail ({})", report.claim);
        1
    } else {
        0
    }
}

fn main() -> ExitCode {
    ExitCode::from(run_command(std::env::args().collect()))
}
