//! Exact integer linear algebra: matrices over `BigInt`, Smith normal form,
//! kernels and cokernels, and classification of symmetric forms.

mod form;
mod matrix;
mod snf;

pub use form::{classify_form, Definiteness, FormClass, Parity};
pub use matrix::{IntMatrix, JsonInt};
pub use snf::{cokernel, kernel_basis, smith_normal_form, AbelianGroup, SnfResult};

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("zero vector has no divisibility")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// gcd of the entries, always non-negative; 0 for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, &x| acc.gcd(&x))
}

/// Writes `v = d · v̂` with `d` the content of `v` and `v̂` primitive.
pub fn divisibility_split(v: &[i64]) -> Result<(i64, Vec<i64>), LatticeError> {
    let d = content(v);
    if d == 0 {
        return Err(LatticeError::ZeroVector);
    }
    Ok((d, v.iter().map(|x| x / d).collect()))
}
