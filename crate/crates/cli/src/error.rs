use std::process::ExitCode;

use record_mle_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// Unreadable or malformed input files.
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Estimation(CoreError),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{failed} of {total} verification criteria failed")]
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Usage(_) | CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Estimation(_) => 3,
        })
    }
}

impl From<CoreError> for CliError {
    /// Bad arguments are usage errors; everything the model rejects is an
    /// estimation error.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Argument(msg) => CliError::Usage(msg),
            CoreError::UnknownFamily(_) => CliError::Usage(e.to_string()),
            other => CliError::Estimation(other),
        }
    }
}
