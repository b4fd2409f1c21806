use std::collections::BTreeSet;

use num_complex::Complex;

use crate::model::{Drive, Harmonic, PeriodicHamiltonian, StaticHamiltonian};
use crate::protocols::{ProtocolError, SimulationPlan};
use crate::scalar::{lit, Real};

/// Star with centre 0 and leaves `1..=n`; edge `(0, j)` carries
/// `J1 cos(Omega t + pi/2)` for `j` in `partition` and `J1 cos(Omega t)`
/// otherwise. The target couples every `p` in `partition` to every `q`
/// outside it with `<p|H|q> = i J1^2 / (2 Omega)`; the centre is isolated.
/// `t_evol` is zero; set it on the returned plan if needed.
pub fn build_star_cbg_protocol<T: Real>(
    n: usize,
    partition: &[usize],
    j1: T,
    period: T,
) -> Result<SimulationPlan<T>, ProtocolError> {
    if n < 2 {
        return Err(ProtocolError::InvalidPartition("star needs at least 2 leaves".into()));
    }
    let p: BTreeSet<usize> = partition.iter().copied().collect();
    if p.len() != partition.len() {
        return Err(ProtocolError::InvalidPartition("repeated node".into()));
    }
    if let Some(&bad) = p.iter().find(|&&j| j == 0 || j > n) {
        return Err(ProtocolError::InvalidPartition(format!("node {bad} is not a leaf")));
    }
    if p.is_empty() || p.len() == n {
        return Err(ProtocolError::InvalidPartition(
            "partition must be a proper nonempty subset".into(),
        ));
    }
    if !(period > T::zero()) || !period.is_finite() || !j1.is_finite() {
        return Err(ProtocolError::InvalidParameter(
            "need positive period and finite J1".into(),
        ));
    }
    let mut skel = StaticHamiltonian::new(n + 1)?;
    for j in 1..=n {
        skel.set_coupling(0, j, Complex::new(T::one(), T::zero()))?;
    }
    let mut drive = PeriodicHamiltonian::new(skel, period)?;
    for j in 1..=n {
        let phase = if p.contains(&j) { T::FRAC_PI_2() } else { T::zero() };
        drive = drive.with_edge_drive(0, j, Drive::harmonic(T::zero(), vec![Harmonic::new(1, j1, phase)])?)?;
    }
    let omega = drive.omega();
    let k = j1 * j1 / (lit::<T>(2.0) * omega);
    let mut target = StaticHamiltonian::new(n + 1)?;
    for &a in &p {
        for b in (1..=n).filter(|b| !p.contains(b)) {
            target.set_coupling(a, b, Complex::new(T::zero(), k))?;
        }
    }
    SimulationPlan::new(drive, target, T::zero(), T::one())
}
