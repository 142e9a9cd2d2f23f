use std::io;
use std::path::PathBuf;

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    MissingInput { path: PathBuf, source: io::Error },
    #[error("malformed {path}: {reason}")]
    BadInput { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] ringflow_core::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the input, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::MissingInput { .. } | CliError::BadInput { .. } => 2,
            CliError::Core(e) if e.is_validation() => 2,
            _ => 1,
        }
    }

    pub(crate) fn output(path: impl Into<PathBuf>, source: impl Into<io::Error>) -> Self {
        CliError::Output { path: path.into(), source: source.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
