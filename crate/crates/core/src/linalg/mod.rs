//! Dense complex matrices and the Hermitian/unitary matrix functions built on
//! one eigendecomposition kernel.

mod eigen;
mod functions;
mod matrix;

use thiserror::Error;

pub use eigen::HermitianEigen;
pub(crate) use functions::dot;
pub use functions::{
    check_hermitian, eigenvalues_hermitian, expm_hermitian, expm_hermitian_with, logm_unitary, logm_unitary_with,
    operator_norm, unitarity_residual,
};
pub use matrix::{ComplexMatrix, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitianInput { residual: f64 },
    #[error("matrix is not unitary (||U^dagger U - I|| = {defect:e})")]
    NonUnitaryInput { defect: f64 },
    #[error("eigenphase {phase} lies within the branch-cut margin of +-pi")]
    BranchCut { phase: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix rows are not square ({rows} rows, a row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty matrix or vector")]
    Empty,
    #[error("state vector has zero or non-finite norm")]
    ZeroNorm,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
