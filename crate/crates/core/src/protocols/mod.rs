//! Concrete driving protocols and their target effective models.

mod graphs;
mod nnn;
mod star;
mod triangle;
mod waveguide;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::magnus::MagnusError;
use crate::model::{ModelError, PeriodicHamiltonian, StaticHamiltonian};
use crate::scalar::{to_f64, Real};

pub use graphs::{
    build_switch, build_switch_with, build_triangle_chain, build_triangle_chain_with, compensate_couplings,
    switch_effective_model, triangle_chain_effective_model, LabeledProtocol,
};
pub use nnn::{build_1d_nnn_protocol, nnn_edge_drive};
pub use star::build_star_cbg_protocol;
pub use triangle::{
    bessel_j0, effective_phase, triangle_drives, triangle_effective_coupling, TriangleKind, TriangleProtocol,
};
pub use waveguide::{waveguide_coupling, waveguide_positions, waveguide_reconstructed_coupling};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid protocol parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("effective coupling is zero; phase undefined")]
    ZeroCoupling,
    #[error("edge ({i}, {j}) renormalization vanishes; cannot compensate")]
    CompensationSingular { i: usize, j: usize },
    #[error("coupling {value} of edge {edge} at z = {z} outside (0, kappa)")]
    CouplingOutOfRange { edge: usize, z: f64, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A drive together with the static model it simulates after rescaling.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct SimulationPlan<T> {
    pub drive: PeriodicHamiltonian<T>,
    pub target: StaticHamiltonian<T>,
    /// Evolution time of the target model.
    pub t_evol: T,
    /// Evolution time of the driven model, `t_evol / scale`.
    pub t_sim: T,
    /// `H_eff(drive) ~ scale * target`.
    pub scale: T,
    pub steps_per_period: usize,
}

impl<T: Real> SimulationPlan<T> {
    pub(crate) fn new(
        drive: PeriodicHamiltonian<T>,
        target: StaticHamiltonian<T>,
        t_evol: T,
        scale: T,
    ) -> Result<Self, ProtocolError> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(ProtocolError::InvalidParameter("scale must be positive".into()));
        }
        if !(t_evol >= T::zero()) || !t_evol.is_finite() {
            return Err(ProtocolError::InvalidParameter("t_evol must be non-negative".into()));
        }
        let steps_per_period = default_steps(&drive);
        Ok(Self {
            drive,
            target,
            t_evol,
            t_sim: t_evol / scale,
            scale,
            steps_per_period,
        })
    }

    pub fn period(&self) -> T {
        self.drive.period()
    }

    /// Whole periods covering `t_sim`.
    pub fn periods(&self) -> usize {
        (to_f64(self.t_sim / self.drive.period()) - 1e-9).ceil().max(0.0) as usize
    }

    /// Target-model time reached after `periods()` whole periods.
    pub fn matched_time(&self) -> T {
        crate::scalar::from_usize::<T>(self.periods()) * self.drive.period() * self.scale
    }
}

/// `ceil(max(200, 40 h_max T))`.
pub fn default_steps<T: Real>(drive: &PeriodicHamiltonian<T>) -> usize {
    let x = 40.0 * to_f64(drive.h_max() * drive.period());
    x.max(200.0).ceil() as usize
}
