//! Error taxonomy: data errors exit 1, configuration errors exit 2.

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Problems with the input data (unreadable files, empty streams,
    /// schema mismatches in data files).
    #[error("{0}")]
    Data(String),
    /// Problems with the configuration (bad config file, missing required
    /// settings, level/store mismatches).
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Data(_) => ExitCode::from(1),
            CliError::Config(_) => ExitCode::from(2),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// IO errors while reading data files are data errors with path context.
pub fn io_data(path: &std::path::Path, err: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {err}", path.display()))
}
