use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three families that callers (notably the CLI) map to
/// distinct exit codes: malformed input, violated preconditions, and numerical
/// invariants that failed to hold after a computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid exhausted: {0}")]
    GridExhausted(String),

    #[error("numerical invariant `{invariant}` violated: {detail}")]
    Numerical { invariant: &'static str, detail: String },

    #[error("no convergence after {iterations} iterations (last relative change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn numerical(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            invariant,
            detail: detail.into(),
        }
    }

    /// True for errors caused by malformed textual input.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::InvalidCurve(_))
    }

    /// True for errors signalling that a computed quantity broke an asserted bound.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. } | Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
