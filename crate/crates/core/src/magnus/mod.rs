//! Effective Hamiltonians of periodically driven walks: Magnus orders 0 and 1,
//! the numeric logarithm of the period propagator, the rotating-frame
//! reduction for on-site drives, drive symmetry tests and period bounds.

mod bounds;
mod expansion;
mod rotated;
mod symmetry;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::model::{ModelError, StaticHamiltonian};
use crate::propagate::PropagateError;
use crate::scalar::Real;

pub use bounds::period_bound;
pub use expansion::{
    heff_first_order, heff_numeric, heff_numeric_converged, heff_order0, heff_order1, heff_order1_fourier,
    heff_order1_quadrature, heff_order1_segments, truncation_error, truncation_error_with,
};
pub use rotated::{coupling_renormalization, lab_frame_effective, rotated_effective_couplings, rotating_frame_offsets};
pub use symmetry::{drive_symmetry_check, pair_symmetry_check, symmetry_check_fn, SymmetryReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MagnusError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("skeleton coupling ({0}, {1}) is not real")]
    ComplexSkeleton(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Truncation order of an effective Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EffectiveOrder {
    /// Time average `H_0`.
    Zero,
    /// The first-order correction term alone.
    FirstCorrection,
    /// `H_0` plus the first-order correction.
    ZeroPlusOne,
    /// `i log U(T) / T`, all orders up to integrator error.
    Numeric,
}

/// How the matrix was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    AnalyticFourier,
    AnalyticSegments,
    Quadrature,
    RotatingFrame,
    NumericLog,
}

#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian<T> {
    pub matrix: ComplexMatrix<T>,
    pub order: EffectiveOrder,
    pub period: T,
    pub provenance: Provenance,
}

impl<T: Real> EffectiveHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> num_complex::Complex<T> {
        self.matrix[(i, j)]
    }

    /// Graph view; entries of modulus at most `drop_tol` are dropped.
    pub fn to_static(&self, drop_tol: T) -> Result<StaticHamiltonian<T>, ModelError> {
        StaticHamiltonian::from_matrix(&self.matrix, drop_tol)
    }
}
