use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Every failure is explicit: numerical trouble (non-finite values, CFL
/// violations, divergent iterations) is reported rather than papered over.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("resolution too coarse: {0}")]
    UnderResolved(String),

    #[error("point at the origin: the Landau field is singular there")]
    SingularPoint,

    #[error("CFL violation at t = {t}: dt = {dt} exceeds the limit {limit}")]
    Cfl { t: f64, dt: f64, limit: f64 },

    #[error("non-finite value detected at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("iteration diverged: {0}")]
    Diverged(String),

    #[error("constants ledger is missing `{0}`")]
    Unpopulated(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
