use thiserror::Error;

/// Errors surfaced by planners, scenario loading and distribution setup.
///
/// Contract violations (dimension mismatches on hot-path collision queries,
/// non-unit vectors passed to density evaluation) panic instead; they are
/// programming errors, not runtime conditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("free-space sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: u64 },

    #[error("grid explosion: {bins} direction bins exceeds limit {limit}")]
    GridExplosion { bins: u64, limit: u64 },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("invalid endpoint {which}: {reason}")]
    InvalidEndpoint { which: &'static str, reason: String },

    #[error("scenario schema violation in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
