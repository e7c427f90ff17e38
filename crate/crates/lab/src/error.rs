use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("policy {policy} failed on instance {instance}: {source}")]
    Policy {
        policy: String,
        instance: usize,
        #[source]
        source: arbandit::PolicyError,
    },
    #[error(transparent)]
    Model(#[from] arbandit::Error),
    #[error("{0}")]
    Runtime(String),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for anything that
    /// fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Json { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
