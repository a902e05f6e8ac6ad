//! Quantization of the factor matrices: the discrete 1-D pencil and its
//! elimination, and polynomial-calculus checks of the Pauli operator identities.

mod pauli;
mod pencil;
mod poly;

pub use pauli::*;
pub use pencil::*;
pub use poly::*;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::spin::{RealVector3, SpinError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantizeError {
    #[error("grid needs at least 3 interior points, got {0}")]
    GridTooSmall(usize),
    #[error("grid of {n} points exceeds the dense solver limit {max}")]
    GridTooLarge { n: usize, max: usize },
    #[error("invalid interval [{x_min}, {x_max}]")]
    InvalidInterval { x_min: f64, x_max: f64 },
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("hbar must be positive, got {0}")]
    NonPositiveHbar(f64),
    #[error("potential has non-finite samples")]
    NonFinitePotential,
    #[error("eliminated operator is not tridiagonal")]
    NotTridiagonal,
    #[error("polynomial degree {degree} exceeds the cap {max}")]
    DegreeOverflow { degree: u32, max: u32 },
    #[error("polynomials over {left} and {right} variables")]
    VariableMismatch { left: usize, right: usize },
    #[error("spinor needs {expected} components, got {got}")]
    SpinorLength { expected: usize, got: usize },
    #[error("curl of the gauge is {curl}, expected {b}")]
    CurlMismatch { curl: RealVector3, b: RealVector3 },
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
