//! Exact integer linear algebra on [`IntMatrix`].
//!
//! Everything here works over arbitrary-precision integers: fraction-free
//! determinants, Smith normal form with unimodular transforms, definiteness,
//! indecomposability, scaled inverses with an explicit denominator, and a
//! canonical form under simultaneous row/column permutation.

mod canonical;
mod det;
mod matrix;
mod snf;

use thiserror::Error;

pub use canonical::{canonical_perm_form, CANONICAL_MAX_DIM};
pub use det::{
    det, is_indecomposable, is_positive_definite, leading_minors, p_adic_valuation, scaled_inverse,
    scaled_inverse_integral, ScaledInverse,
};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfResult};

pub(crate) use matrix::{
    deserialize_bigint, deserialize_bigint_vec, serialize_bigint, serialize_bigint_vec,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntMatError {
    #[error("matrix must have at least one row and one column")]
    EmptyShape,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("cannot multiply {left:?} by {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is singular")]
    Singular,
    #[error("scaled inverse is not integral (denominator {0})")]
    NotIntegral(String),
    #[error("dimension {dim} exceeds canonical-form bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("p-adic valuation of zero is infinite")]
    ZeroValuation,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("entry does not fit in a machine integer")]
    EntryTooLarge,
}
