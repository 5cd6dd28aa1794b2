//! Exact arithmetic for finitely generated abelian groups.
//!
//! Groups are order vectors, elements are canonical residue vectors and
//! homomorphisms are integer matrices. Everything runs on `BigInt`.

mod group;
mod matrix;
mod ops;
mod snf;

pub use group::{FgAbGroup, GroupElement, GroupHom};
pub use matrix::IntMatrix;
pub use ops::{factorize, is_prime, kernel, primary_decomposition, prime_power, solve};
pub use snf::{snf, SnfResult};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("elements of different groups: {left} vs {right}")]
    GroupMismatch { left: FgAbGroup, right: FgAbGroup },
    #[error("negative cyclic order {0}")]
    NegativeOrder(BigInt),
    #[error("homomorphism is not well defined on source summand {column}")]
    IllDefined { column: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("group {0} is infinite")]
    Infinite(FgAbGroup),
}
