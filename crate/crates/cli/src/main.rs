//! `bigv` — seeded, reproducible experiment runs and analysis reports.
//!
//! Exit codes: 0 success, 1 usage or configuration, 2 I/O or parse,
//! 3 acceptance failure.

mod commands;
mod config;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "bigv",
    about = "Bell-experiment simulation and collider analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an experiment and write the dataset plus a JSON summary.
    Simulate(SimulateArgs),
    /// Run independence and posterior analyses over a dataset CSV.
    Analyze(AnalyzeArgs),
    /// Build a bundled scenario and report its counterfactual diagnostics.
    Scenario(ScenarioArgs),
    /// Run the full claim suite and write the consolidated report.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment to run: v1, v2, or bigv.
    #[arg(long)]
    experiment: Option<String>,
    /// Number of trials.
    #[arg(long)]
    n: Option<u64>,
    /// RNG seed (falls back to $BIGV_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset output path.
    #[arg(long)]
    out: Option<String>,
    /// Summary JSON output path.
    #[arg(long)]
    summary: Option<String>,
    /// Dataset format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Leave the initial-state column empty in the output.
    #[arg(long)]
    mask_initial: bool,
    /// JSON run-config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Dataset CSV produced by `simulate`.
    #[arg(long)]
    data: String,
    /// Keep only trials with this initial label (i1 or i2) before analysis.
    #[arg(long)]
    preselect: Option<String>,
    /// Conditional-independence test spec X:Y or X:Y:Z1,Z2 (repeatable).
    #[arg(long = "ci")]
    ci: Vec<String>,
    /// Test both no-signalling conditions.
    #[arg(long)]
    no_signalling: bool,
    /// Estimate the posteriors over the initial label.
    #[arg(long)]
    posteriors: bool,
    /// Significance level for the G² tests.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Report output path.
    #[arg(long, default_value = "report.json")]
    out: String,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario name: damascus or bigv-retro.
    name: String,
    /// Lock the scenario's collider.
    #[arg(long)]
    constrained: bool,
    /// bigv-retro parameterization: locked-compatible or unlocked-demo.
    #[arg(long)]
    mode: Option<String>,
    /// Setting-dependence strength for unlocked-demo.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Seed for the fine-tuning sweep.
    #[arg(long)]
    seed: Option<u64>,
    /// Fine-tuning sweep trial count.
    #[arg(long, default_value_t = 200)]
    sweep_trials: u32,
    /// Fine-tuning perturbation size.
    #[arg(long, default_value_t = 0.05)]
    sweep_epsilon: f64,
    /// Report output path.
    #[arg(long, default_value = "report.json")]
    out: String,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Report output path.
    #[arg(long, default_value = "report.json")]
    out: String,
    /// Inject a deliberate defect (negative-control fixture).
    #[arg(long, hide = true)]
    fault: Option<String>,
}

/// Process-level failure carrying its exit code.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Io(String),
    Acceptance(Vec<String>),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            AppError::Io(_) => 2,
            AppError::Acceptance(_) => 3,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Io(m) => write!(f, "i/o error: {m}"),
            AppError::Acceptance(failing) => {
                write!(f, "acceptance failure in: {}", failing.join(", "))
            }
        }
    }
}

impl From<bigv_core::Error> for AppError {
    fn from(e: bigv_core::Error) -> Self {
        match e {
            bigv_core::Error::Csv { .. } => AppError::Io(e.to_string()),
            other => AppError::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Analyze(args) => commands::analyze(args),
        Command::Scenario(args) => commands::scenario(args),
        Command::Reproduce(args) => commands::reproduce(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bigv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
