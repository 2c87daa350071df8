use std::fmt;

/// Errors produced anywhere in the cleaning and evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("truncated input at byte offset {offset}: expected {expected} more bytes")]
    Truncated { offset: usize, expected: usize },

    #[error("cannot parse header field `{field}`: {value:?}")]
    HeaderField { field: String, value: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("unknown channel `{label}` (available: {})", ChannelList(.available))]
    UnknownChannel { label: String, available: Vec<String> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

struct ChannelList<'a>(&'a [String]);

impl fmt::Display for ChannelList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(", "))
    }
}
