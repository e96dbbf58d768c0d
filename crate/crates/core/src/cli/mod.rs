//! Command-line surface: `compute`, `verify` and `sweep`.
//!
//! Exit codes: 0 success, 2 input error, 3 resource cap, 4 internal
//! invariant violation or failed verification.

mod compute;
mod output;
mod sweep;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::optim::OptimizerConfig;

pub use compute::Quantity;
pub use output::{format_sig17, Row};
pub use sweep::SweepQuantity;
pub use verify::{run_suite, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

/// Flags shared by every subcommand. Absent values fall back to
/// [`OptimizerConfig::default`].
#[derive(Debug, Clone, Default, Args)]
pub struct RunConfig {
    /// Base RNG seed (default: 7)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimizer restarts (default: 32)
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Optimizer step tolerance (default: 1e-6)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Optimizer iteration cap per restart (default: 2000)
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// POVM outcome count (default: square of the measured dimension)
    #[arg(long)]
    pub outcomes: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: text for compute and verify, csv for sweep)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn optimizer(&self) -> Result<OptimizerConfig, CliError> {
        let d = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            restarts: self.restarts.unwrap_or(d.restarts),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            tol: self.tol.unwrap_or(d.tol),
            seed: self.seed.unwrap_or(d.seed),
            outcomes: self.outcomes,
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub(crate) fn config_echo(cfg: &OptimizerConfig) -> String {
    let k = cfg
        .outcomes
        .map(|k| k.to_string())
        .unwrap_or_else(|| "d^2".into());
    format!(
        "config: seed={} restarts={} max_iters={} tol={:e} outcomes={}",
        cfg.seed, cfg.restarts, cfg.max_iters, cfg.tol, k
    )
}

#[derive(Debug, Parser)]
#[command(name = "ci-toolkit", version, about = "Concentrated information, discord and merging bounds for few-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity on a state file
    Compute(compute::ComputeArgs),
    /// Run a verification suite
    Verify(verify::VerifyArgs),
    /// Sweep a quantity over the overlap of the separating family
    Sweep(sweep::SweepArgs),
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionTooLarge { .. } | Error::AncillaTooLarge(_) => EXIT_RESOURCE,
            Error::ObjectiveError { .. } => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered output plus the exit code it should end with.
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

/// Runs the CLI on `args` (program name first), writing the report to
/// `stdout` (or `--out`) and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (flags, result) = match &cli.command {
        Command::Compute(a) => (&a.run, compute::run(a)),
        Command::Verify(a) => (&a.run, verify::run(a)),
        Command::Sweep(a) => (&a.run, sweep::run(a)),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(flags, &outcome.body, stdout) {
                let _ = writeln!(stderr, "error: {}", e.message);
                return e.code;
            }
            if outcome.code != EXIT_OK {
                let _ = writeln!(stderr, "error: one or more checks failed");
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn emit(flags: &RunConfig, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &flags.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::input(format!("--out {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::input(format!("stdout: {e}"))),
    }
}

/// Process entry point.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub(crate) fn split_labels(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

pub(crate) fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}
