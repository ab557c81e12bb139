use std::path::PathBuf;

use cavity_duet_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{0}")]
    Numerical(CoreError),

    #[error("{0}")]
    Breakdown(CoreError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Breakdown(_) => 5,
            CliError::Io { .. } => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::FactorizationBreakdown { .. } => CliError::Breakdown(e),
            CoreError::InvalidParams(_)
            | CoreError::InvalidGrid(_)
            | CoreError::SectorMismatch { .. }
            | CoreError::OutOfRange { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
