use thiserror::Error;

/// Crate-wide error type. CLI consumers rely on [`Error::code`] for stable
/// machine-readable names, so variant renames are breaking changes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The element has an idempotent component within tolerance of zero.
    #[error("element is a zero divisor or zero; no inverse")]
    NotInvertible,

    #[error("supremum/infimum of an empty collection")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("component index {0} out of range (valid: 0..4)")]
    BadIndex(usize),

    /// The requested operation is not defined for this set representation.
    #[error("unsupported set operation: {0}")]
    UnsupportedSet(String),

    /// Rejection sampling exhausted its attempt budget without a member.
    #[error("sampling failure: {0}")]
    SamplingFailure(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// Gauges require the origin in the interior of every part.
    #[error("origin is not interior to the set")]
    OriginNotInterior,

    /// The target point lies outside the cone spanned by the columns.
    #[error("linear program is infeasible")]
    LpInfeasible,

    /// Pivot budget exhausted before reaching an optimum.
    #[error("numerical stall after {0} pivots")]
    NumericalStall(usize),

    #[error("unknown property id: {0}")]
    UnknownProperty(String),

    #[error("bad instance: {0}")]
    BadInstance(String),

    #[error("config error: {0}")]
    ConfigError(String),
}

impl Error {
    /// Stable identifier used in CLI error documents, e.g. `{"error":"NotInvertible"}`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NotInvertible => "NotInvertible",
            Error::EmptySet => "EmptySet",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadIndex(_) => "BadIndex",
            Error::UnsupportedSet(_) => "UnsupportedSet",
            Error::SamplingFailure(_) => "SamplingFailure",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::OriginNotInterior => "OriginNotInterior",
            Error::LpInfeasible => "LpInfeasible",
            Error::NumericalStall(_) => "NumericalStall",
            Error::UnknownProperty(_) => "UnknownProperty",
            Error::BadInstance(_) => "BadInstance",
            Error::ConfigError(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
