//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong when constructing domain objects or
/// evaluating distances.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The normal part of a coefficient vector has norm at or below 1e-12.
    #[error("normal part of the coefficient vector is numerically zero")]
    DegenerateNormal,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An oriented and a non-oriented hyperplane were mixed in one
    /// comparison. Rejected rather than silently canonicalized so sign bugs
    /// cannot hide.
    #[error("cannot compare an oriented with a non-oriented hyperplane")]
    OrientationMismatch,

    #[error("weights must be strictly positive and finite")]
    NonpositiveWeight,

    /// The point set does not span affinely; metric guarantees are void and
    /// sensitivity scores are undefined.
    #[error("point set is not full rank")]
    NotFullRank,

    #[error("invalid parameter: {0}")]
    BadParameter(String),

    #[error("input must not be empty")]
    EmptyInput,

    #[error("curves have different segment counts: {left} vs {right}")]
    MismatchedK { left: usize, right: usize },

    /// Two consecutive curve segments lie on one support line, so the shared
    /// vertex cannot be recovered from the line representation.
    #[error("segments {segment} and {next} share a support line", next = segment + 1)]
    DegenerateTurn { segment: usize },

    #[error("lines {index} and {next} are parallel; their intersection is undefined", next = index + 1)]
    ParallelLines { index: usize },

    #[error("need at least {needed} points, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },

    #[error("k = {k} is out of range for {n} items")]
    BadK { k: usize, n: usize },

    /// All x-coordinates coincide; no slope can be estimated.
    #[error("all x-coordinates coincide; slope undefined")]
    DegenerateX,

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
