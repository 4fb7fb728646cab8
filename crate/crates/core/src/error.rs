use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector is not in the span of the basis (first residual coordinate {index})")]
    NotInSpan { index: usize },
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("matrix index ({row}, {col}) out of range for a {rows}x{cols} map")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis mismatch: expected `{expected}`, found `{found}`")]
    BasisMismatch { expected: String, found: String },
    #[error("{what} = {value} out of range [{min}, {max}]")]
    OutOfRange { what: &'static str, value: usize, min: usize, max: usize },
    #[error("invalid generator w({a},{b})")]
    InvalidGenerator { a: usize, b: usize },
    #[error("label {label} out of range for ambient arity {n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("ambient arity mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("element is not homogeneous (degrees {first} and {second})")]
    NotHomogeneous { first: usize, second: usize },
    #[error("element is not annihilated by the circle contraction")]
    NotDeltaClosed,
    #[error("grading automorphism needs a nonzero scalar")]
    ZeroScalar,
    #[error("not a permutation of 1..{0}")]
    InvalidPermutation(usize),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
