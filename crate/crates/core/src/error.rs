use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive computation was requested on a state space that is too large.
    #[error("capacity error: {what} needs {needed} but the limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    /// An iterative solver stopped before reaching its tolerance.
    #[error("iteration limit reached after {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },

    /// An input that must satisfy a fixed-point system does not.
    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("unsupported motif for {what}: {motif}")]
    UnsupportedMotif { what: &'static str, motif: String },

    /// A bound was requested but one of its required hypotheses fails.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    /// Neither contraction formula yields a positive rate.
    #[error("no contraction: {0}")]
    NoContraction(String),

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    /// Malformed model file, motif text or CSV input.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
