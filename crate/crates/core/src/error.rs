//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building models, sampling, or running
/// experiments. Numerical routines return `InvalidParameter` for domain
/// violations rather than panicking, so the CLI can surface them cleanly.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the documented domain (wrong range, wrong sign,
    /// incompatible dimensions, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A matrix failed a structural requirement (symmetry, zero diagonal,
    /// finite entries).
    #[error("invalid coupling matrix: {0}")]
    InvalidCoupling(String),

    /// Enumeration was requested for a system too large to enumerate.
    #[error("system size {n} exceeds the enumeration limit of {limit} sites")]
    TooLargeToEnumerate { n: usize, limit: usize },

    /// A statistic was evaluated against a critical value calibrated for a
    /// different statistic.
    #[error("statistic mismatch: critical value was calibrated for {expected}, got {actual}")]
    StatisticMismatch { expected: String, actual: String },

    /// A sampler cannot handle the requested model (e.g. the auxiliary-variable
    /// sampler needs a strictly ferromagnetic Curie-Weiss coupling).
    #[error("sampler not applicable: {0}")]
    SamplerNotApplicable(String),

    /// Configuration file / CLI problems.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
