//! `walk` command-line harness: single runs and sweeps, invariant
//! verification, and multi-run coverage statistics.

pub mod args;
pub mod output;
pub mod run;
pub mod spec;
pub mod stats;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

pub use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Walk(#[from] scatterwalk::WalkError),
}

impl CliError {
    pub fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// 0 success, 1 verification failure, 2 invalid input, 3 I/O failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Invalid { .. } | CliError::Walk(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Dispatches a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run::cmd_run(&spec::ExperimentSpec::from_run_args(&args)?),
        Command::Verify(args) => verify::cmd_verify(&args),
        Command::Stats(args) => stats::cmd_stats(&args),
    }
}
