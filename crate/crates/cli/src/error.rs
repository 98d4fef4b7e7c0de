use std::path::PathBuf;

use thiserror::Error;

/// Everything the harness can fail with, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    /// Unreadable or invalid configuration; `message` names the line or field.
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    /// Input data that does not have the expected shape.
    #[error("{path}: {message}")]
    Data { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] barracuda_core::Error),
    #[error("{failed} of {total} assertions failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ChecksFailed { .. } => 1,
            HarnessError::Usage(_)
            | HarnessError::Config { .. }
            | HarnessError::Data { .. }
            | HarnessError::Model(_) => 2,
            HarnessError::Io { .. } => 3,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
