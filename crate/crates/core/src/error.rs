use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("odd number of half-edges ({0})")]
    OddStubTotal(u64),
    #[error("evaluation at t={t} is not before the critical time {t_c}")]
    BeyondCritical { t: f64, t_c: f64 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
