use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document has no text or no retained tokens")]
    EmptyDocument,
    #[error("corpus contains no tokens")]
    EmptyCorpus,
    #[error("corpus has {0} document(s); at least 2 are needed to split")]
    CorpusTooSmall(usize),
    #[error("invalid compression rate {0}; expected 0 < rate <= 1")]
    InvalidRate(f64),
    #[error("invalid split ratio {0}; expected 0 < ratio < 1")]
    InvalidRatio(f64),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("document has no token known to the model")]
    DegenerateDocument,
    #[error("test set has no scoreable token")]
    NoScoreableTokens,
    #[error("distribution q is zero where p is positive (index {0})")]
    NonAbsolutelyContinuous(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed model file: {0}")]
    ModelFormat(String),
    #[error("malformed input at line {line}: {message}")]
    Input { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure comes from the filesystem rather than the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}
