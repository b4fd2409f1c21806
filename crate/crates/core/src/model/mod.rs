//! Static and time-periodic quantum-walk Hamiltonians.

mod drive;
mod hamiltonian;

use thiserror::Error;

pub(crate) use drive::fraction_to;
pub use drive::{reduced_phase, Drive, Fraction, Harmonic, HarmonicSeries, Piecewise, WindowedSine};
pub use hamiltonian::{PeriodicHamiltonian, StaticHamiltonian};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("node {node} out of range for dimension {dim}")]
    NodeOutOfRange { node: usize, dim: usize },
    #[error("self-edge at node {0}; on-site energies are set separately")]
    SelfEdge(usize),
    #[error("edge ({0}, {1}) listed twice")]
    DuplicateEdge(usize, usize),
    #[error("no skeleton edge ({0}, {1}) to drive")]
    MissingEdge(usize, usize),
    #[error("non-finite coupling or energy")]
    NonFinite,
    #[error("matrix is not Hermitian")]
    NonHermitian,
    #[error("period must be positive and finite")]
    InvalidPeriod,
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
