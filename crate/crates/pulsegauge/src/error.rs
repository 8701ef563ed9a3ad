use std::io;
use std::path::PathBuf;

use pulsegauge_core::Error as CoreError;
use serde::Serialize;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown job {0}")]
    UnknownJob(u64),
    #[error("job queue is full ({0} jobs pending or running)")]
    QueueFull(usize),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            AppError::Core(e) => match e {
                CoreError::InvalidRequest(_) => "invalid_request",
                CoreError::InvalidInput(_) => "invalid_input",
                CoreError::Parse { .. } => "parse_error",
                CoreError::LexiconMissing => "lexicon_missing",
                CoreError::InvalidScore(_) => "invalid_score",
                CoreError::EmptyValidation => "empty_validation",
                CoreError::EmptyWindow => "empty_window",
                CoreError::InsufficientData(_) => "insufficient_data",
                CoreError::LengthMismatch { .. } => "length_mismatch",
                CoreError::EmptyInput => "empty_input",
                CoreError::ModelLoad(_) => "model_load",
                CoreError::BackendUnavailable(_) => "backend_unavailable",
                CoreError::MalformedResponse { .. } => "malformed_response",
                CoreError::SourceUnavailable(_) => "source_unavailable",
                CoreError::Model { .. } => "model_error",
            },
            AppError::Io { .. } => "io_error",
            AppError::UnknownEntity(_) => "unknown_entity",
            AppError::UnknownJob(_) => "unknown_job",
            AppError::QueueFull(_) => "queue_full",
            AppError::Config(_) => "config_error",
            AppError::Usage(_) => "usage",
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody { error: self.code().to_string(), message: self.to_string() }
    }
}

/// `{"error": code, "message": ...}` as emitted by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}
