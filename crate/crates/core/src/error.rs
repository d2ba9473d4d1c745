use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("unsupported or malformed {format} data: {message}")]
    Format {
        format: &'static str,
        message: String,
    },

    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    pub(crate) fn format(format: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            format,
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
