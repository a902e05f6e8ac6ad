//! Dense complex linear algebra.
//!
//! Everything here works on [`ComplexMatrix`], a plain row-major container.
//! The matrices the rest of the crate builds are small (at most 80 x 80 for
//! four spin-1/2 particles) or banded (1-D grids), so there is no sparse
//! machinery: products skip exact zeros and banded spectra go through
//! [`SymTridiagonal`].

mod eigen;
mod lu;
mod matrix;
mod nullspace;
mod schur;
mod tridiag;

use num_complex::Complex64;
use thiserror::Error;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use lu::{det_lu, LuDecomposition};
pub use matrix::{vec_dot, vec_norm, ComplexMatrix, ComplexVector, DEFAULT_MAX_DIM};
pub use nullspace::{null_space, DEFAULT_NULL_TOL};
pub use schur::{block_det_schur, schur_factor_check, BlockPartition, SINGULAR_CONDITION};
pub use tridiag::SymTridiagonal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("result would be {dim}x{dim}, above the configured maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("block partition k={k} is invalid for a {n}x{n} matrix (need 0 < k < n)")]
    InvalidPartition { k: usize, n: usize },
    #[error("trailing block is singular (condition estimate {condition:e})")]
    SingularBlock { condition: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not Hermitian: max|M - M^H| = {defect:e}")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Kronecker product with the default size limit [`DEFAULT_MAX_DIM`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product `(a ⊗ b)[i*rb + p, j*cb + q] = a[i, j] * b[p, q]`.
pub fn kron_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= max_dim && c <= max_dim => (r, c),
        (r, c) => {
            return Err(LinalgError::TooLarge {
                dim: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
                max: max_dim,
            })
        }
    };
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..rb {
                for q in 0..cb {
                    out[(i * rb + p, j * cb + q)] = aij * b[(p, q)];
                }
            }
        }
    }
    Ok(out)
}
