use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("recipe `{recipe}` cannot run on the {backend} backend: {reason}")]
    BackendMismatch { recipe: String, backend: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] vpure::Error),
    #[error("validation suite failed: {failed} of {total} checks")]
    ValidationFailed { failed: usize, total: usize },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::ConfigInvalid { path: path.into(), message: message.into() }
    }

    /// 2 for configuration and I/O problems, 3 for numerical failures, 4
    /// when the validation suite reports a failed check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid { .. }
            | CliError::BackendMismatch { .. }
            | CliError::Output { .. }
            | CliError::Input { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::ValidationFailed { .. } => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
