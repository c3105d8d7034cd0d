use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid experiment or component configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Dimension mismatches, failed factorizations, precision loss.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Inputs outside the domain of an analytical formula.
    #[error("domain error: {0}")]
    Domain(String),
    /// An agent could not complete a round.
    #[error("agent `{agent}` failed at seed {seed}, t={t}: {reason}")]
    Step {
        agent: String,
        seed: u64,
        t: usize,
        reason: String,
    },
    /// Malformed text input (config or dataset files).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
