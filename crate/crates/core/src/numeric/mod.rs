//! Exact arithmetic in ℚ(θ) and its floating realization in ℝ^d.

pub mod field;
pub mod hp;
pub mod poly;
pub mod qvec;
pub mod realize;
pub mod vector;

pub use field::{parse_rational, NumberField, Scalar, DEFAULT_PRECISION_BITS};
pub use qvec::{QMat, QVec};
pub use realize::{contraction_power, inv_op_norm, norm, Part, Realization, RealizationRow, Realizer};
pub use vector::{FMatrix, FVec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("minimal polynomial must be monic of degree at least 1")]
    NotMonic,
    #[error("minimal polynomial factors over the rationals")]
    RejectReducible,
    #[error("root hint is ambiguous: roots {0} are both within 1e-6")]
    RejectAmbiguousRoot(String),
    #[error("roots could not be refined to {0} bits")]
    Precision(u32),
    #[error("bad polynomial: {0}")]
    BadPolynomial(String),
    #[error("division by zero")]
    DivideByZero,
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad realization: {0}")]
    BadRealization(String),
    #[error("no power Q^k with k <= 64 has inverse norm below 1")]
    NotExpansive,
}
