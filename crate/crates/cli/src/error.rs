use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad user input; exit code 2.
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qnetlab_core::Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Every failure before a report exists is an argument problem from
    /// the caller's point of view, except I/O and serialization.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Json(_) | CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}
