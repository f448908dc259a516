use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a complex: d∘d is nonzero on basis vector {witness}")]
    NotAComplex { witness: String },
    #[error("truncation overflow: weight {weight} exceeds cap {cap}")]
    TruncationOverflow { weight: usize, cap: usize },
    #[error("operator is not invertible")]
    NotInvertible,
    #[error("perturbation does not lower the filtration: {0}")]
    NotNilpotent(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
