use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isn_core::report::{
    cmd_analyze, cmd_core, cmd_enforce, cmd_mcnet, cmd_shapley, superadditivity_warning,
    ReportError, TextReport,
};
use isn_core::scenario::{load_scenario, ScenarioError};
use isn_core::{IsnError, Money};

/// Analyze industrial symbiotic networks as cooperative games and synthesize
/// incentive rules for a policy.
#[derive(Parser)]
#[command(name = "isn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Skip the superadditivity validation.
    #[arg(long)]
    no_superadditivity_check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Coalition values, Shapley value, core, and implementability.
    Analyze(Common),
    /// Synthesize incentives for the scenario's policy and check the result.
    Enforce {
        #[command(flatten)]
        common: Common,
        /// Margin by which prohibited groups are pushed below zero.
        #[arg(long, default_value = "1")]
        epsilon: Money,
    },
    /// Shapley value only.
    Shapley(Common),
    /// Core status and a core allocation.
    Core(Common),
    /// Dump the MC-Net transformation of the game.
    Mcnet(Common),
}

enum Failure {
    Io(String),
    Validation(String),
    Bound(String),
}

impl From<IsnError> for Failure {
    fn from(e: IsnError) -> Self {
        match e {
            IsnError::BoundExceeded { .. } => Failure::Bound(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Failure::Io(e.to_string()),
            ScenarioError::Validation {
                error: IsnError::BoundExceeded { .. },
                message,
            } => Failure::Bound(message),
            ScenarioError::Validation { message, .. } => Failure::Validation(message),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Isn(inner) => inner.into(),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn emit<R: Serialize + TextReport>(report: R, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Validation(e.to_string()))?;
            s.push('\n');
            s
        }
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    let (common, epsilon) = match &cli.command {
        Command::Analyze(c) | Command::Shapley(c) | Command::Core(c) | Command::Mcnet(c) => {
            (c, None)
        }
        Command::Enforce { common, epsilon } => (common, Some(epsilon)),
    };
    let scenario = load_scenario(&common.file)?;
    if !common.no_superadditivity_check {
        if let Some(warning) = superadditivity_warning(&scenario) {
            eprintln!("warning: {warning}");
        }
    }
    let format = common.format;
    match &cli.command {
        Command::Analyze(c) => emit(cmd_analyze(&scenario, !c.no_superadditivity_check)?, format),
        Command::Enforce { .. } => {
            let epsilon = epsilon.expect("enforce has an epsilon");
            emit(cmd_enforce(&scenario, epsilon)?, format)
        }
        Command::Shapley(_) => emit(cmd_shapley(&scenario)?, format),
        Command::Core(_) => emit(cmd_core(&scenario)?, format),
        Command::Mcnet(_) => emit(cmd_mcnet(&scenario)?, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Bound(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
