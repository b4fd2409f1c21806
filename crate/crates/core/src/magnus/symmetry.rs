use serde::Serialize;

use crate::magnus::MagnusError;
use crate::model::{reduced_phase, Drive};
use crate::scalar::{from_usize, lit, Real};

/// Outcome of the two drive-symmetry tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryReport<T> {
    pub breaks_inversion: bool,
    pub breaks_shift_inversion: bool,
    /// `min_tau max_t |beta(t - tau) - beta(-t - tau)|`.
    pub inversion_residual: T,
    /// `max_t |beta(t) + beta(t - T/2)|`.
    pub shift_residual: T,
}

/// Symmetry tests for an arbitrary `T`-periodic function. Inversion is
/// tested as evenness about some `tau` on a `tau_grid`-point grid, which is
/// the property that forces `<sin V_ij>_T = 0`; shift inversion as
/// `beta(t) = -beta(t - T/2)`. A symmetry counts as broken when its residual
/// exceeds `1e-8 * amplitude`.
pub fn symmetry_check_fn<T: Real>(
    beta: impl Fn(T) -> T,
    amplitude: T,
    period: T,
    tau_grid: usize,
) -> Result<SymmetryReport<T>, MagnusError> {
    if tau_grid < 100 {
        return Err(MagnusError::InvalidArgument("tau_grid must be at least 100".into()));
    }
    if !(period > T::zero()) {
        return Err(MagnusError::InvalidArgument("period must be positive".into()));
    }
    let n_t = 2 * tau_grid;
    let half = lit::<T>(0.5);
    // Half-offset samples avoid landing exactly on drive breakpoints.
    let ts: Vec<T> = (0..n_t)
        .map(|k| (from_usize::<T>(k) + half) * period / from_usize(n_t))
        .collect();
    let f = |t: T| beta(reduced_phase(t, period) * period);

    let mut inversion = T::infinity();
    for j in 0..tau_grid {
        let tau = from_usize::<T>(j) * period / from_usize(tau_grid);
        let mut worst = T::zero();
        for &t in &ts {
            worst = worst.max((f(t - tau) - f(-t - tau)).abs());
            if worst >= inversion {
                break;
            }
        }
        inversion = inversion.min(worst);
    }
    let shift = ts
        .iter()
        .map(|&t| (f(t) + f(t - period * half)).abs())
        .fold(T::zero(), T::max);
    let tol = lit::<T>(1e-8) * amplitude.abs();
    Ok(SymmetryReport {
        breaks_inversion: inversion > tol,
        breaks_shift_inversion: shift > tol,
        inversion_residual: inversion,
        shift_residual: shift,
    })
}

pub fn drive_symmetry_check<T: Real>(
    beta: &Drive<T>,
    period: T,
    tau_grid: usize,
) -> Result<SymmetryReport<T>, MagnusError> {
    symmetry_check_fn(|t| beta.value(t, period), beta.amplitude(), period, tau_grid)
}

/// Tests `beta_ij = beta_i - beta_j`; `None` is an undriven node.
pub fn pair_symmetry_check<T: Real>(
    beta_i: Option<&Drive<T>>,
    beta_j: Option<&Drive<T>>,
    period: T,
    tau_grid: usize,
) -> Result<SymmetryReport<T>, MagnusError> {
    let value = |d: Option<&Drive<T>>, t: T| d.map(|d| d.value(t, period)).unwrap_or_else(T::zero);
    let amp = |d: Option<&Drive<T>>| d.map(Drive::amplitude).unwrap_or_else(T::zero);
    symmetry_check_fn(
        |t| value(beta_i, t) - value(beta_j, t),
        amp(beta_i) + amp(beta_j),
        period,
        tau_grid,
    )
}
