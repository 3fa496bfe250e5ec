//! Command-line front end: state and marker files, CSV densities.

use std::path::PathBuf;

pub mod commands;
pub mod files;
pub mod format;

/// Failure of a command, mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] entpdf_core::Error),
    #[error("{0}")]
    GoalNotMet(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid input, 3 when a statistical goal is not met, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Core(_) => 2,
            CliError::GoalNotMet(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}
