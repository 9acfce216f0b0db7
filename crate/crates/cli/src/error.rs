use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Compute(#[from] h2ion::Error),

    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn output(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Output { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Output { .. } => 1,
        }
    }
}
