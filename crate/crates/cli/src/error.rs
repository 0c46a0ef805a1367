use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(rbc_core::Error),
    #[error("{0}")]
    ReplayMismatch(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Format(_) => "format",
            CliError::Core(_) => "domain",
            CliError::ReplayMismatch(_) => "replay_mismatch",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Format(_) => 4,
            CliError::Core(_) => 5,
            CliError::ReplayMismatch(_) => 6,
        }
    }

    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Inner<'a> {
            category: &'a str,
            message: String,
            exit_code: i32,
        }
        #[derive(Serialize)]
        struct Record<'a> {
            error: Inner<'a>,
        }
        serde_json::to_string(&Record {
            error: Inner {
                category: self.category(),
                message: self.to_string(),
                exit_code: self.exit_code(),
            },
        })
        .expect("error record serializes")
    }
}

impl From<rbc_core::Error> for CliError {
    fn from(e: rbc_core::Error) -> Self {
        match e {
            rbc_core::Error::Format(m) => CliError::Format(m),
            other => CliError::Core(other),
        }
    }
}
