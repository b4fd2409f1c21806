use crate::protocols::ProtocolError;
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Coupling of waveguides `j` and `j + 1` (1-based) at propagation distance
/// `z`: `J0 + J1 (cos(Omega z - j pi/2) - 2 cos(2 Omega z - j pi/2))`.
pub fn waveguide_coupling<T: Real>(j: usize, z: T, j0: T, j1: T, omega: T) -> T {
    let phi = from_usize::<T>(j) * T::FRAC_PI_2();
    j0 + j1 * ((omega * z - phi).cos() - lit::<T>(2.0) * (lit::<T>(2.0) * omega * z - phi).cos())
}

/// Transverse positions `x[j][k]` of waveguide `j + 1` at `z_grid[k]` for
/// evanescent coupling `kappa e^{-gamma |dx|}`: `gamma x_1 = cos(Omega z)`
/// and `x_{j+1} = x_j + ln(J_{j,j+1} / kappa) / gamma`.
#[allow(clippy::too_many_arguments)]
pub fn waveguide_positions<T: Real>(
    n: usize,
    kappa: T,
    gamma: T,
    j0: T,
    j1: T,
    omega: T,
    z_grid: &[T],
) -> Result<Vec<Vec<T>>, ProtocolError> {
    if n < 1 {
        return Err(ProtocolError::InvalidParameter("need at least one waveguide".into()));
    }
    if !(gamma > T::zero()) || !(kappa > T::zero()) || !gamma.is_finite() || !kappa.is_finite() {
        return Err(ProtocolError::InvalidParameter(
            "kappa and gamma must be positive".into(),
        ));
    }
    let mut x = Vec::with_capacity(n);
    x.push(z_grid.iter().map(|&z| (omega * z).cos() / gamma).collect::<Vec<T>>());
    for j in 1..n {
        let mut next = Vec::with_capacity(z_grid.len());
        for (k, &z) in z_grid.iter().enumerate() {
            let c = waveguide_coupling(j, z, j0, j1, omega);
            if !(c > T::zero() && c < kappa) {
                return Err(ProtocolError::CouplingOutOfRange {
                    edge: j,
                    z: to_f64(z),
                    value: to_f64(c),
                });
            }
            next.push(x[j - 1][k] + (c / kappa).ln() / gamma);
        }
        x.push(next);
    }
    Ok(x)
}

/// `kappa e^{-gamma |x_j - x_{j+1}|}` at grid index `k` (`j` 1-based).
pub fn waveguide_reconstructed_coupling<T: Real>(positions: &[Vec<T>], kappa: T, gamma: T, j: usize, k: usize) -> T {
    kappa * (-gamma * (positions[j - 1][k] - positions[j][k]).abs()).exp()
}
