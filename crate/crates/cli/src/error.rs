use thiserror::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("scorer unavailable: {0}")]
    Scorer(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Scorer(_) => 3,
            CliError::Io(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl From<c3_core::Error> for CliError {
    fn from(e: c3_core::Error) -> Self {
        use c3_core::Error as E;
        match e {
            E::ScorerUnavailable(_) | E::Protocol(_) => CliError::Scorer(e.to_string()),
            E::Io(_) => CliError::Io(e.to_string()),
            E::InsufficientData(_) => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("serialization failed: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
