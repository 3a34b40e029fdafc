//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors raised by construction, linear algebra, and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix or vector was constructed with a NaN or infinite entry.
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    /// A shape constraint between operands was violated.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// An index set was empty where at least one member is required.
    #[error("empty index set")]
    EmptyIndexSet,
    /// An index referred past the ambient dimension.
    #[error("index {index} out of range for dimension {limit}")]
    IndexOutOfRange { index: usize, limit: usize },
    /// Index-set members must be strictly increasing.
    #[error("index set not strictly increasing at position {0}")]
    NotStrictlyIncreasing(usize),
    /// The coefficient matrix did not have full column rank.
    #[error("rank deficient: estimated rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    /// The vector handed to a projection ratio had zero norm.
    #[error("zero vector")]
    ZeroVector,
    /// Every single-coordinate removal left a rank-deficient restriction.
    #[error("degenerate active set: no candidate removal keeps full rank")]
    DegenerateActiveSet,
    /// A configuration precondition was violated.
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    /// Subset enumeration would exceed the allowed budget.
    #[error("enumeration budget exceeded: {required} subsets, limit {limit}")]
    Budget { required: u128, limit: u128 },
    /// The simplex routine exceeded its iteration cap.
    #[error("simplex iteration limit reached after {0} pivots")]
    SimplexStall(usize),
    /// A warm start failed the feasibility check it claims.
    #[error("warm start violates the big-M constraints")]
    InfeasibleWarmStart,
    /// MPS text could not be parsed.
    #[error("malformed MPS input at line {line}: {reason}")]
    MpsParse { line: usize, reason: &'static str },
}
