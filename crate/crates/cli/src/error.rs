use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{0}")]
    Cap(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for validation failures, 3 for resource caps, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<lrqc::Error> for CliError {
    fn from(e: lrqc::Error) -> Self {
        match e {
            lrqc::Error::CapExceeded(_) | lrqc::Error::TooManySites(_) => CliError::Cap(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
