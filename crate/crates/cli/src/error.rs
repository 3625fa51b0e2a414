use std::fmt;

use tagnet_core::DomainError;

/// Command failures, bucketed by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario, report, or argument content (exit 2).
    Validation(String),
    /// Filesystem or socket trouble (exit 3).
    Io(String),
    /// Malformed or out-of-order feed input (exit 4).
    Feed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Feed(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid input: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Feed(msg) => write!(f, "feed error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DomainError> for CliError {
    fn from(err: DomainError) -> Self {
        CliError::Validation(err.to_string())
    }
}
