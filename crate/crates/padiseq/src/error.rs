use thiserror::Error;

/// Library-wide error type. The CLI maps each variant to a distinct exit code,
/// so callers can tell "bad input" from "not enough digits to decide".
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's domain (composite where a prime is needed,
    /// denominator sharing a factor with the base, degenerate recurrence, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested answer is not determined by the available digits.
    #[error("precision error: {0}")]
    Precision(String),
    /// Malformed textual input (expressions, b-files, CLI arguments).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
