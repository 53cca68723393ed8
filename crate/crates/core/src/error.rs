use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero dimension: {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },

    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid range: {0}")]
    Range(String),

    #[error("schedule `{schedule}`: {message}")]
    Schedule { schedule: String, message: String },

    #[error("invalid network: {0}")]
    Construction(String),

    #[error("training: {0}")]
    Training(String),

    #[error("evaluation: {0}")]
    Evaluation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: label is not one-hot: {message}")]
    Label { line: usize, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error("backend self-test failed: {0}")]
    SelfTest(String),
}

impl Error {
    pub(crate) fn shape(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::Shape {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// True for errors caused by bad user configuration rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Range(_) | Error::Construction(_))
    }
}
