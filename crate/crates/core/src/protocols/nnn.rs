use num_complex::Complex;

use crate::analysis::h_1d_open;
use crate::model::{Drive, Harmonic, PeriodicHamiltonian, StaticHamiltonian};
use crate::protocols::{ProtocolError, SimulationPlan};
use crate::scalar::{from_usize, lit, Real};

/// Drive of chain edge `j` (1-based):
/// `J0 + J1 (cos(Omega t - j pi/2) - 2 cos(2 Omega t - j pi/2))`.
pub fn nnn_edge_drive<T: Real>(j: usize, j0: T, j1: T) -> Result<Drive<T>, ProtocolError> {
    let phi = -from_usize::<T>(j) * T::FRAC_PI_2();
    Ok(Drive::harmonic(
        j0,
        vec![
            Harmonic::new(1, j1, phi),
            Harmonic::new(2, lit::<T>(2.0) * j1, phi + T::PI()),
        ],
    )?)
}

/// Open chain of `n` nodes whose first-order effective Hamiltonian is
/// `scale * H_1D(K1, i |K2|)` with `scale = 3T / (4 pi)`.
pub fn build_1d_nnn_protocol<T: Real>(
    n: usize,
    k1: T,
    k2_abs: T,
    period: T,
    t_evol: T,
) -> Result<SimulationPlan<T>, ProtocolError> {
    if n < 3 {
        return Err(ProtocolError::InvalidParameter("chain needs at least 3 nodes".into()));
    }
    if !(period > T::zero()) || !period.is_finite() {
        return Err(ProtocolError::InvalidParameter("period must be positive".into()));
    }
    if !k1.is_finite() || !k2_abs.is_finite() || k2_abs < T::zero() {
        return Err(ProtocolError::InvalidParameter("need finite K1 and |K2| >= 0".into()));
    }
    let scale = lit::<T>(3.0) * period / (lit::<T>(4.0) * T::PI());
    let j0 = scale * k1;
    let j1 = k2_abs.sqrt();
    let mut skel = StaticHamiltonian::new(n)?;
    for e in 0..n - 1 {
        skel.set_coupling(e, e + 1, Complex::new(T::one(), T::zero()))?;
    }
    let mut drive = PeriodicHamiltonian::new(skel, period)?;
    for e in 0..n - 1 {
        drive = drive.with_edge_drive(e, e + 1, nnn_edge_drive(e + 1, j0, j1)?)?;
    }
    let target = h_1d_open(n, Complex::new(k1, T::zero()), Complex::new(T::zero(), k2_abs))?;
    SimulationPlan::new(drive, target, t_evol, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::magnus::{heff_first_order, heff_numeric_converged, heff_order1_fourier};
    use crate::NumericsSettings;

    #[test]
    fn figure_parameters() {
        let p = build_1d_nnn_protocol(50, 1.0, 0.2, 0.5, 7.0).unwrap();
        let d = &p.drive.edge_drives()[&(0, 1)];
        assert!((d.mean() - 1.5 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((p.t_sim - 4.0 * std::f64::consts::PI * 7.0 / 1.5).abs() < 1e-12);
        assert_eq!(p.periods(), 118);
        assert_eq!(p.steps_per_period, 200);
        assert!((p.target.coupling(3, 5) - Complex::new(0.0, 0.2)).norm() < 1e-15);
        assert!((p.target.coupling(3, 4) - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn edge_drive_at_zero() {
        // J0 + J1 (cos(j pi/2) - 2 cos(j pi/2)) = J0 - J1 cos(j pi/2).
        for j in 1..6 {
            let d = nnn_edge_drive(j, 0.3, 0.5).unwrap();
            let want = 0.3 - 0.5 * (j as f64 * std::f64::consts::FRAC_PI_2).cos();
            assert!((d.value(0.0, 1.0) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_k2_gives_plain_walk() {
        let p = build_1d_nnn_protocol(6, 1.0, 0.0, 0.3, 1.0).unwrap();
        assert_eq!(p.target.edge_count(), 5);
        let h1 = heff_order1_fourier(&p.drive, 4).unwrap();
        assert!(h1.matrix.max_abs() < 1e-14);
    }

    #[test]
    fn first_order_equals_scaled_target() {
        let p = build_1d_nnn_protocol(8, 1.0, 0.2, 0.1, 1.0).unwrap();
        let h = heff_first_order(&p.drive).unwrap();
        let diff = &h.matrix - &p.target.matrix().scale_real(p.scale);
        assert!(operator_norm(&diff) < 1e-12);
    }

    #[test]
    fn numeric_heff_approaches_target_linearly() {
        let settings = NumericsSettings::default();
        let rel: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&t| {
                let p = build_1d_nnn_protocol(8, 1.0, 0.2, t, 1.0).unwrap();
                let h = heff_numeric_converged(&p.drive, &settings).unwrap();
                let diff = &h.matrix - &p.target.matrix().scale_real(p.scale);
                operator_norm(&diff) / p.scale
            })
            .collect();
        for w in rel.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 1.6 && ratio < 2.5, "{rel:?}");
        }
    }
}
