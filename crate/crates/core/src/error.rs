use std::io;

use thiserror::Error;

/// Errors raised by configuration, oracle preconditions and persistence.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or flag combination that cannot describe a valid run.
    #[error("configuration error: {0}")]
    Config(String),

    /// An oracle input outside the domain its statement covers.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A structured-text input that could not be parsed.
    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    /// Data read back from disk that lacks required fields.
    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
