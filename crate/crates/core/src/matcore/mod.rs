//! Dense complex Hermitian linear algebra for 2x2 and 4x4 matrices:
//! arithmetic, a deterministic cyclic-Jacobi eigensolver, spectral matrix
//! functions and Kronecker products. No external linear-algebra backend;
//! at these sizes determinism is worth more than throughput.

mod eig;
mod matrix;

pub use eig::{
    hermitian_eig, matrix_exp, matrix_function, matrix_sqrt, Eigensystem, JACOBI_TOL, MAX_SWEEPS,
    SQRT_CLAMP,
};
pub use matrix::{
    partial_trace_left, partial_trace_right, tensor_product, ComplexMatrix, HERMITIAN_TOL,
};

pub(crate) use eig::fix_phase_and_normalize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("Jacobi iteration did not converge: off-diagonal norm {off_diagonal:e} after max sweeps")]
    NoConvergence { off_diagonal: f64 },
    #[error("tensor product result dimension {dim} exceeds the supported 4")]
    SizeOverflow { dim: usize },
    #[error("matrix function undefined at eigenvalue {eigenvalue}")]
    DomainError { eigenvalue: f64 },
}
