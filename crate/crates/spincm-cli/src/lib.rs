//! Front end for the `spincm` binary: configuration, suites and file output.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod suites;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("singularity: {0}")]
    Singular(String),
    #[error("{0}")]
    Residual(String),
    #[error(transparent)]
    Lib(spincm::Error),
}

impl From<spincm::Error> for CliError {
    fn from(e: spincm::Error) -> Self {
        match e {
            spincm::Error::Pole(m) => CliError::Singular(m),
            e @ spincm::Error::OutsideU { .. } => CliError::Singular(e.to_string()),
            e => CliError::Lib(e),
        }
    }
}

impl CliError {
    /// 1 residual failure, 2 usage or configuration error, 3 singularity abort.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Residual(_) => 1,
            CliError::Config(_) | CliError::Io(_) | CliError::Lib(_) => 2,
            CliError::Singular(_) => 3,
        }
    }
}
