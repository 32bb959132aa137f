//! `ppdo`: command-line driver for periodic-symbol pseudodifferential
//! operators.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical refusal,
//! 4 I/O error. Failures print a JSON error record on stderr.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::{Command, Params, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "ppdo", version, about = "Periodic-symbol pseudodifferential operators")]
struct Cli {
    /// TOML run configuration; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Option<Sub>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Lattice Fourier coefficients of period-cell samples (or of a Gabor symbol).
    Coeffs,
    /// Apply Op_τ(p) to a signal.
    Apply,
    /// Continuity bound, optionally checked by power iteration.
    Bound,
    /// Neumann-series inverse applied to a signal.
    Invert,
    /// Gabor frame: dual window at one lattice, or a zone scan.
    Gabor,
    /// Fourier multiplier with periodic symbol, plus the necessity witness.
    Multiplier,
    /// Run the invariant suite.
    Selftest,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Coeffs => Command::Coeffs,
            Sub::Apply => Command::Apply,
            Sub::Bound => Command::Bound,
            Sub::Invert => Command::Invert,
            Sub::Gabor => Command::Gabor,
            Sub::Multiplier => Command::Multiplier,
            Sub::Selftest => Command::Selftest,
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let record = report::error_record(e.kind(), e.exit_code(), &e.message(), e.report());
    eprintln!("{}", serde_json::to_string_pretty(&record).expect("JSON values serialize"));
    ExitCode::from(e.exit_code())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli.command.map(Command::from), cli.threads, cli.params, cli.config.as_deref())?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let result = commands::dispatch(&cfg)?;
    let passed = cfg.command != Command::Selftest || result["passed"] == serde_json::Value::Bool(true);
    let csv_on_stdout = cfg.command == Command::Gabor && cfg.params.scan.is_some() && cfg.params.output.is_none();
    if !csv_on_stdout || cfg.params.report.is_some() {
        report::emit(&report::envelope(cfg.command.name(), result), cfg.params.report.as_deref())?;
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => fail(&e),
    }
}
