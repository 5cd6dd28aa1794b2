//! Higher-order differences of maps `S → G` along a right-zero action, and
//! the universal operators `D_{q,ℓ}` that express `f(x + θy) - f(x)`
//! modulo a prime power `q` as an integer combination of derived differences.

mod algebra;
mod operator;

pub use algebra::{delta, ActionAlgebra, GValuedMap};
pub use operator::{check_congruence, CongruenceReport, CongruenceViolation, DiagonalEvaluator, DiffOperator, DiffTerm, MAX_ELL, MAX_EXPONENT};

use thiserror::Error;

use crate::abelian::AbelianError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("difference length {0} is too large")]
    EllTooLarge(u64),
    #[error("exponent {0} is too large")]
    ExponentTooLarge(u32),
    #[error("malformed operator: {0}")]
    Header(String),
    #[error("malformed action table: {0}")]
    Table(String),
    #[error("x + 0 != x for x = {x}")]
    RightZero { x: usize },
    #[error("{what} index {index} out of range (size {size})")]
    OutOfRange { what: &'static str, index: usize, size: usize },
    #[error("{what}: expected length {expected}, got {got}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AbelianError),
}
