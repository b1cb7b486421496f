use std::path::PathBuf;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line} is not valid UTF-8")]
    Decode { path: PathBuf, line: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no embedding for token {token:?} in sentence {sentence}")]
    Lookup { token: String, sentence: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("loop aborted after {completed} iteration(s): {reason}")]
    Aborted { completed: usize, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// True for errors caused by bad input data rather than bad invocation.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Argument(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
