use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for the whole pipeline. Variants distinguish bad
/// input data (schema, parse, empty) from invalid requests (mismatched
/// dimensions, impossible fold counts) because the CLI maps them to
/// different exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing required column '{column}'")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: {detail}")]
    Malformed { path: PathBuf, detail: String },

    #[error("{path}: no usable records")]
    EmptyCorpus { path: PathBuf },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model file {path}: {detail}")]
    ModelFormat { path: PathBuf, detail: String },

    #[error("feature names do not match the model (model has {model}, input has {input})")]
    FeatureMismatch { model: usize, input: usize },

    #[error("{0}")]
    Protocol(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn malformed(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Error::Malformed { path: path.into(), detail: detail.into() }
    }
}
