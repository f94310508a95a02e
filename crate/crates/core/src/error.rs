//! Error type shared across the crate.

use std::fmt;

/// Errors raised by chromosome construction, schedule building, and the
/// evolutionary operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Amplitudes do not describe a unit-norm qubit.
    Normalization { norm_squared: f64 },
    /// Amplitude inputs were not finite numbers.
    NonFinite,
    /// A chromosome may only grow; shrink requests are rejected.
    ShrinkRejected { current: usize, requested: usize },
    /// Lengthening schedule parameters are inconsistent.
    InvalidSchedule(String),
    /// An operator received an empty population.
    EmptyPopulation,
    /// A population smaller than the operator supports.
    PopulationTooSmall { needed: usize, got: usize },
    /// Paired structures disagree in length.
    LengthMismatch { expected: usize, got: usize },
    /// A parameter fell outside its documented domain.
    InvalidParameter(String),
    /// Rotation lookup received a key outside the 8-row table.
    UnknownLookupKey,
    /// The problem cannot decode a phenotype of this width.
    EncodingMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Normalization { norm_squared } => write!(
                f,
                "amplitudes are not normalizable: |a|^2 + |b|^2 = {norm_squared}"
            ),
            Error::NonFinite => write!(f, "amplitudes must be finite"),
            Error::ShrinkRejected { current, requested } => write!(
                f,
                "chromosomes only lengthen: current {current}, requested {requested}"
            ),
            Error::InvalidSchedule(why) => write!(f, "invalid lengthening schedule: {why}"),
            Error::EmptyPopulation => write!(f, "operation requires a non-empty population"),
            Error::PopulationTooSmall { needed, got } => {
                write!(
                    f,
                    "operation requires at least {needed} individuals, got {got}"
                )
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::UnknownLookupKey => write!(f, "rotation lookup key outside the 8-row table"),
            Error::EncodingMismatch { expected, got } => {
                write!(f, "problem expects {expected} genes, phenotype has {got}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
