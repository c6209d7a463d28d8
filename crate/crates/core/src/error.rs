use thiserror::Error;

/// Errors raised by the algebraic engine.
///
/// Check failures (a non-associative product, a broken cocycle) are never
/// errors; they are reported as data. Errors are reserved for inputs that
/// violate an operation's preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("truncation order mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("direction index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("membership violated: {0}")]
    Membership(String),
    #[error("no equivalence: {0}")]
    NoEquivalence(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
