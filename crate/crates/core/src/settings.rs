use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

/// Tolerances and step limits shared by the numerical routines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound = "T: Real")]
pub struct NumericsSettings<T> {
    /// Largest `|M_ij - conj(M_ji)|` accepted as Hermitian, relative to `max(1, max|M_ij|)`.
    pub hermitian_tol: T,
    /// Largest `||U^dagger U - I||` accepted as unitary.
    pub unitary_tol: T,
    /// Minimum distance of every eigenphase from the branch cut at `+-pi`.
    pub branch_margin: T,
    /// Step-halving stops when successive period propagators differ by less than this.
    pub convergence_tol: T,
    /// Steps per period for the first adaptive attempt.
    pub initial_steps: usize,
    /// Cap on steps per period for the adaptive propagator.
    pub max_steps: usize,
}

impl<T: Real> Default for NumericsSettings<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            hermitian_tol: lit::<T>(1e-12).max(eps * lit(64.0)),
            unitary_tol: lit::<T>(1e-10).max(eps * lit(1024.0)),
            branch_margin: lit::<T>(1e-6).max(eps * lit(64.0)),
            convergence_tol: lit::<T>(1e-9).max(eps * lit(1024.0)),
            initial_steps: 100,
            max_steps: 6400,
        }
    }
}
