//! Periodically driven continuous-time quantum walks.

// Negated comparisons are used on purpose so that NaN fails validation.
// Index loops mirror the matrix notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod linalg;
pub mod magnus;
pub mod model;
pub mod propagate;
pub mod protocols;
pub mod scalar;
pub mod settings;

use thiserror::Error;

pub use scalar::Real;
pub use settings::NumericsSettings;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Propagate(#[from] propagate::PropagateError),
    #[error(transparent)]
    Magnus(#[from] magnus::MagnusError),
    #[error(transparent)]
    Protocol(#[from] protocols::ProtocolError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}

pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type StateVector = linalg::StateVector<f64>;
pub type Drive = model::Drive<f64>;
pub type StaticHamiltonian = model::StaticHamiltonian<f64>;
pub type PeriodicHamiltonian = model::PeriodicHamiltonian<f64>;
pub type EffectiveHamiltonian = magnus::EffectiveHamiltonian<f64>;
pub type EvolutionRecord = propagate::EvolutionRecord<f64>;
pub type SimulationPlan = protocols::SimulationPlan<f64>;
pub type LabeledProtocol = protocols::LabeledProtocol<f64>;
pub type GaugePhases = analysis::GaugePhases<f64>;
pub type Settings = NumericsSettings<f64>;
