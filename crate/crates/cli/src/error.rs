use std::process::ExitCode;

use thiserror::Error;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input data.
    #[error("{0}")]
    Input(String),
    /// Invalid configuration or missing configuration files.
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Internal(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Config(_) => ExitCode::from(3),
        }
    }

    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
