use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("negative weight {weight} at position {position}")]
    NegativeWeight { position: f64, weight: f64 },
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("mass mismatch: {0} vs {1}")]
    MassMismatch(f64, f64),
    #[error("mass {needed} exceeds available mass {available}")]
    MassExceeds { needed: f64, available: f64 },
    #[error("measure must have mass 1, got {0}")]
    MassNotOne(f64),
    #[error("function has no affine minorant (left tail slope {left} > right tail slope {right})")]
    UnboundedBelow { left: f64, right: f64 },
    #[error("function is not convex near {at}: slope drops by {drop}")]
    NotConvex { at: f64, drop: f64 },
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("point {x} lies below the target set minimum {min}")]
    BelowSupport { x: f64, min: f64 },
    #[error("target set must be non-empty and strictly increasing")]
    InvalidTargetSet,
    #[error("invalid lift: {0}")]
    InvalidLift(String),
    #[error("internal invariant broken: {0}")]
    InternalInvariant(String),
    #[error("irreducible decomposition failed verification: {0}")]
    DecompositionFailure(String),
    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteInput(_) => "NonFiniteInput",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::MassMismatch(..) => "MassMismatch",
            Error::MassExceeds { .. } => "MassExceeds",
            Error::MassNotOne(_) => "MassNotOne",
            Error::UnboundedBelow { .. } => "UnboundedBelow",
            Error::NotConvex { .. } => "NotConvex",
            Error::OrderViolation(_) => "OrderViolation",
            Error::BelowSupport { .. } => "BelowSupport",
            Error::InvalidTargetSet => "InvalidTargetSet",
            Error::InvalidLift(_) => "InvalidLift",
            Error::InternalInvariant(_) => "InternalInvariant",
            Error::DecompositionFailure(_) => "DecompositionFailure",
            Error::SizeCap { .. } => "SizeCap",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
