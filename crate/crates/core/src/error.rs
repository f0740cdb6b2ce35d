use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("usage error: {0}")]
    Usage(String),

    /// An enumeration or table would exceed the configured budget.
    #[error("capacity exceeded: {what} needs {needed} terms but the budget is {budget}")]
    Capacity {
        what: String,
        needed: u128,
        budget: u128,
    },

    /// A randomized search ran out of iterations.
    #[error("search exhausted in {stage}: {summary}")]
    SearchExhausted { stage: String, summary: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A mathematical invariant that must always hold was observed to fail.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// A certificate failed to replay.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
