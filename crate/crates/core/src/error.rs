use crate::dataset::Family;

/// Errors produced by dataset handling, training, and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("split protocol violation: {0}")]
    Protocol(String),

    #[error("family {0} not present in the dataset")]
    MissingFamily(Family),

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("training set contains a single class: {0}")]
    SingleClass(String),

    #[error("undefined split: {0}")]
    UndefinedSplit(String),

    #[error("roc curve undefined: actuals contain a single class")]
    UndefinedRoc,

    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input data or configuration, as
    /// opposed to internal failures. The CLI maps these to exit code 2.
    pub fn is_config_or_data(&self) -> bool {
        !matches!(self, Error::Model(_))
    }
}
