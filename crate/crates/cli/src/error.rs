use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration is unreadable, malformed or violates an invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("simulation failed: {0}")]
    Runtime(robust_moss::Error),
}

impl CliError {
    /// 2 for configuration and validation problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => 2,
            _ => 1,
        }
    }
}

impl From<robust_moss::Error> for CliError {
    fn from(e: robust_moss::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
