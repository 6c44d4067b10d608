use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("code has dimension 0 (rank {rank} equals length {cols})")]
    DegenerateCode { rank: usize, cols: usize },

    #[error("component code length {0} is below the minimum of 3")]
    TooShort(usize),

    #[error("component code length {0} exceeds the exhaustive oracle limit of {max}", max = crate::component::ORACLE_MAX_LEN)]
    TooLarge(usize),

    #[error("constraint node {node} has degree {degree}, below the minimum for its check type")]
    DegenerateRow { node: usize, degree: usize },

    #[error("invalid base matrix: {0}")]
    InvalidBase(String),

    #[error("decoder configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("threshold search not bracketed: {0}")]
    NotBracketed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}:{line}:{column}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            column,
            message: message.into(),
        }
    }

    /// Attach a file path to a parse error; other variants pass through.
    pub fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse {
                line,
                column,
                message,
                ..
            } => Error::Parse {
                path: Some(p.into()),
                line,
                column,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
