use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: usize, message: String },
    #[error("no lexicon loaded")]
    LexiconMissing,
    #[error("score {0} outside its valid range")]
    InvalidScore(f64),
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("no records in window")]
    EmptyWindow,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("length mismatch: {golds} gold labels vs {preds} predictions")]
    LengthMismatch { golds: usize, preds: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("model load failed: {0}")]
    ModelLoad(String),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("malformed response{}: {message}", index.map(|i| alloc::format!(" at item {i}")).unwrap_or_default())]
    MalformedResponse { index: Option<usize>, message: String },
    #[error("source unavailable: {0}")]
    SourceUnavailable(String),
    #[error("model `{model}`: {message}")]
    Model { model: String, message: String },
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { source_name: source_name.into(), line, message: message.into() }
    }
}
