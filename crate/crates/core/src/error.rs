use thiserror::Error;

/// Errors raised by the engine. Verification failures are never errors;
/// they are reported as failing claims.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("elements belong to different algebras")]
    MismatchedAlgebra,
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("size {n} exceeds enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("partition is not bi-non-crossing for this colouring")]
    NotBnc,
    #[error("diagram has a string reaching the top gap")]
    HasTopSpine,
    #[error("suffix family does not match the tail of the colouring")]
    SuffixMismatch,
    #[error("word of length {needed} exceeds module depth {depth}")]
    DepthExceeded { depth: usize, needed: usize },
    #[error("operand {index} is not in the {side} algebra")]
    SideMismatch { index: usize, side: String },
    #[error("colouring error: {0}")]
    Colouring(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
