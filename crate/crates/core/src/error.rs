use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// reproduce the failure from the inputs alone.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("elements belong to different groups: {0:?} vs {1:?}")]
    GroupMismatch(Vec<u32>, Vec<u32>),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("axiom {axiom} violated: {detail}")]
    Axiom { axiom: &'static str, detail: String },

    #[error("relation algebra does not split over the rationals: {0}")]
    NonRationalSplitting(String),

    #[error("scheme is not a translation scheme")]
    NotTranslation,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("code has {size} words, above the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u128 },

    #[error("code is not additive")]
    NotAdditive,

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("grid embedding rejected: {0}")]
    Embedding(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
