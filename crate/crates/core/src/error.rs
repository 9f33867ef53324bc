use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent {exponent} is not below the series precision {prec}")]
    ExponentBeyondPrecision { exponent: i64, prec: i64 },

    /// A coefficient (or coefficient range) was requested that the series
    /// does not certify.
    #[error("insufficient precision: need exponents below {needed}, series is known below {available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("eta quotient has non-integral q-shift ({numerator}/24)")]
    NonIntegralShift { numerator: i64 },

    #[error("eta factor delta={delta} does not divide level {level}")]
    LevelMismatch { delta: u64, level: u64 },

    #[error("invalid eta quotient: {0}")]
    InvalidEtaQuotient(String),

    #[error("unknown form '{0}'")]
    UnknownForm(String),

    #[error("unsupported discriminant {0}")]
    UnsupportedDiscriminant(i64),

    #[error("elimination failed at exponent {exponent}: residual pivot {pivot} is not a unit")]
    Elimination { exponent: i64, pivot: String },

    #[error("cannot construct {0}")]
    Unconstructible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
