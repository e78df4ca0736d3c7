use std::io;
use std::path::Path;
use std::process::ExitCode;

use fifo_anomaly::construct::ConstructError;
use fifo_anomaly::search::SearchError;
use fifo_anomaly::PagingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for usage and parse errors, 3 for I/O, 4 for inputs that violate a
    /// model invariant. 1 is reserved for failed checks.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => ExitCode::from(2),
            CliError::Io { .. } => ExitCode::from(3),
            CliError::Invalid(_) => ExitCode::from(4),
        }
    }
}

impl From<PagingError> for CliError {
    fn from(e: PagingError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Invalid(e.to_string())
    }
}
