use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),

    #[error("physics precondition violated: {0}")]
    Physics(#[from] dilaton_interferometry::Error),

    #[error("physics precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error on {path}: {source}", path = .path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("validation failed: {failures} of {checks} checks outside tolerance")]
    ValidationFailed { failures: usize, checks: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Physics(_) | CliError::Precondition(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn parse(message: impl Into<String>) -> Self {
        CliError::Parse(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
