use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid discriminant {d}: {reason}")]
    InvalidDiscriminant { d: i64, reason: &'static str },

    #[error("discriminant {0} exceeds the supported range |d| <= 2^40")]
    DiscriminantTooLarge(i128),

    #[error("forms have different discriminants ({0} vs {1})")]
    MismatchedDiscriminant(i64, i64),

    #[error("{l} does not divide the class number {h}")]
    OrderNotDividing { l: u64, h: u64 },

    #[error("coefficient index {n} beyond the provider bound {bound}")]
    CoefficientBound { n: u64, bound: u64 },

    #[error("conductors not coprime: {0}")]
    NotCoprime(String),

    #[error("argument {arg} within 1e-8 of a pole of {factor}")]
    Pole { arg: String, factor: String },

    #[error("tolerance not met: achieved {achieved:.3e}, target {target:.3e} ({what})")]
    Tolerance { achieved: f64, target: f64, what: String },

    #[error("root number unavailable for provider {0}")]
    RootNumberUnavailable(String),

    #[error("character index {index} out of range (group has {count} characters)")]
    CharacterIndex { index: usize, count: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("character {index}: {source}")]
    AtCharacter { index: usize, source: Box<Error> },
}

impl Error {
    /// Process exit code for this error: 2 for domain errors, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Tolerance { .. } => 3,
            Error::AtCharacter { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
