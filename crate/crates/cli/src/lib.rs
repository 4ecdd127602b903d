//! Batch front end: a JSON configuration in, a JSON report or CSV table out.
//!
//! Every run records the checks it made (a gap and its tolerance). The
//! process exit code summarizes the outcome:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every check within tolerance |
//! | 1 | a reported gap exceeds its tolerance |
//! | 2 | configuration error |
//! | 3 | precondition violation |
//! | 4 | numerical non-convergence |

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

use clap::ValueEnum;
use thiserror::Error;

pub use config::{Format, RunConfig};
pub use report::{Check, RunReport, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] polyens_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Core(e) if e.is_numerical() => 4,
            Self::Core(_) => 3,
        }
    }
}

/// Exit code of a completed run whose checks did not all pass.
pub const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Zcheck,
    Giambelli,
    Ratio,
    Kernel,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Zcheck => "zcheck",
            Self::Giambelli => "giambelli",
            Self::Ratio => "ratio",
            Self::Kernel => "kernel",
            Self::Oracle => "oracle",
        }
    }
}

/// A finished run: the report and its tabular form.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub table: Table,
}

/// Runs `command` on a parsed configuration.
pub fn run(command: Command, mut cfg: RunConfig, seed: Option<u64>) -> Result<Outcome, CliError> {
    if let Some(seed) = seed {
        cfg.numerics.seed = seed;
    }
    let start = Instant::now();
    let out = match command {
        Command::Zcheck => commands::zcheck(&cfg),
        Command::Giambelli => commands::giambelli(&cfg),
        Command::Ratio => commands::ratio(&cfg),
        Command::Kernel => commands::kernel(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    }?;
    let report = RunReport::new(command.name(), cfg, out.outputs, out.checks, out.diagnostics, start.elapsed());
    Ok(Outcome { report, table: out.table })
}

/// Parses configuration text and runs `command`.
pub fn run_text(command: Command, text: &str, seed: Option<u64>) -> Result<Outcome, CliError> {
    run(command, RunConfig::parse(text)?, seed)
}
