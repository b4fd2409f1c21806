use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{logm_unitary_with, operator_norm, ComplexMatrix};
use crate::magnus::{EffectiveHamiltonian, EffectiveOrder, MagnusError, Provenance};
use crate::model::{fraction_to, PeriodicHamiltonian};
use crate::propagate::{converged_period_propagator, period_propagator};
use crate::scalar::{from_usize, lit, re, Real};
use crate::settings::NumericsSettings;

/// Time average of `H(t)`, the `l = 0` Fourier coefficient.
pub fn heff_order0<T: Real>(h: &PeriodicHamiltonian<T>) -> EffectiveHamiltonian<T> {
    EffectiveHamiltonian {
        matrix: h.fourier_coefficient(0),
        order: EffectiveOrder::Zero,
        period: h.period(),
        provenance: Provenance::AnalyticFourier,
    }
}

fn all_real<T: Real>(h: &PeriodicHamiltonian<T>) -> bool {
    h.skeleton().is_real(T::zero())
}

/// Real drives on a real skeleton give a real antisymmetric commutator
/// integrand, so the correction has an identically zero diagonal.
fn finish_correction<T: Real>(
    h: &PeriodicHamiltonian<T>,
    m: ComplexMatrix<T>,
    provenance: Provenance,
) -> EffectiveHamiltonian<T> {
    let mut m = m.hermitian_part();
    if all_real(h) {
        for i in 0..m.dim() {
            m[(i, i)] = Complex::zero();
        }
    }
    EffectiveHamiltonian {
        matrix: m,
        order: EffectiveOrder::FirstCorrection,
        period: h.period(),
        provenance,
    }
}

/// First-order correction from the Fourier coefficients,
/// `(1/Omega) sum_{l=1}^{l_max} (1/l) ([H_l, H_-l] - [H_l, H_0] + [H_-l, H_0])`.
/// Exact when no drive has harmonics above `l_max`.
pub fn heff_order1_fourier<T: Real>(
    h: &PeriodicHamiltonian<T>,
    l_max: usize,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    if l_max == 0 {
        return Err(MagnusError::InvalidArgument("l_max must be at least 1".into()));
    }
    let h0 = h.fourier_coefficient(0);
    let mut acc = ComplexMatrix::zeros(h.dim());
    for l in 1..=l_max {
        let hp = h.fourier_coefficient(l as i64);
        let hm = h.fourier_coefficient(-(l as i64));
        if hp.max_abs() == T::zero() && hm.max_abs() == T::zero() {
            continue;
        }
        let term = &(&hp.commutator(&hm) - &hp.commutator(&h0)) + &hm.commutator(&h0);
        acc = &acc + &term.scale_real(T::one() / from_usize(l));
    }
    Ok(finish_correction(
        h,
        acc.scale_real(T::one() / h.omega()),
        Provenance::AnalyticFourier,
    ))
}

/// First-order correction for piecewise-constant drives from the exact
/// segment double integral, `(1/2iT) sum_{k>j} L_k L_j [H_k, H_j]`.
pub fn heff_order1_segments<T: Real>(h: &PeriodicHamiltonian<T>) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    let segs = h
        .segments()
        .ok_or_else(|| MagnusError::InvalidArgument("drives are not piecewise constant".into()))?;
    let mut acc = ComplexMatrix::zeros(h.dim());
    for k in 0..segs.len() {
        for j in 0..k {
            let (hk, lk) = &segs[k];
            let (hj, lj) = &segs[j];
            acc = &acc + &hk.commutator(hj).scale_real(*lk * *lj);
        }
    }
    let factor = Complex::new(T::zero(), -T::one() / (lit::<T>(2.0) * h.period()));
    Ok(finish_correction(h, acc.scale(factor), Provenance::AnalyticSegments))
}

/// `int_0^s H(s') ds'` in units where the period is 1.
fn integrated_hamiltonian<T: Real>(h: &PeriodicHamiltonian<T>, s: T) -> ComplexMatrix<T> {
    let mut g = h.skeleton().matrix().scale_real(s);
    for (&i, d) in h.onsite_drives() {
        g[(i, i)] = re(d.antiderivative(s));
    }
    for (&(i, j), d) in h.edge_drives() {
        let v = re(d.antiderivative(s));
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    g
}

/// First-order correction from the double time integral,
/// `(T/2i) int_0^1 [H(s), G(s)] ds` with `G` the exact running integral of
/// `H` and composite Simpson on about `points` nodes split at breakpoints.
pub fn heff_order1_quadrature<T: Real>(
    h: &PeriodicHamiltonian<T>,
    points: usize,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    if points < 2 {
        return Err(MagnusError::InvalidArgument("need at least 2 quadrature points".into()));
    }
    let mut acc = ComplexMatrix::zeros(h.dim());
    let bps = h.breakpoints();
    for w in bps.windows(2) {
        let a = fraction_to::<T>(w[0]);
        let b = fraction_to::<T>(w[1]);
        let mut n = ((crate::scalar::to_f64(b - a) * points as f64).ceil() as usize).max(2);
        if n % 2 == 1 {
            n += 1;
        }
        let step = (b - a) / from_usize(n);
        // Nudge the end nodes inside the interval so one-sided drive values are used.
        let inside = |s: T| s.max(a + step * lit(1e-9)).min(b - step * lit(1e-9));
        for k in 0..=n {
            let s = a + from_usize::<T>(k) * step;
            let weight = if k == 0 || k == n {
                T::one()
            } else if k % 2 == 1 {
                lit(4.0)
            } else {
                lit(2.0)
            };
            let hs = h.at_phase(inside(s));
            let gs = integrated_hamiltonian(h, s);
            acc = &acc + &hs.commutator(&gs).scale_real(weight * step / lit(3.0));
        }
    }
    let factor = Complex::new(T::zero(), -h.period() / lit(2.0));
    Ok(finish_correction(h, acc.scale(factor), Provenance::Quadrature))
}

/// First-order correction by the best available route: exact segments,
/// exact Fourier for band-limited drives, quadrature otherwise.
pub fn heff_order1<T: Real>(h: &PeriodicHamiltonian<T>) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    if h.is_piecewise_constant() {
        return heff_order1_segments(h);
    }
    match h.harmonic_bandwidth() {
        Some(b) => heff_order1_fourier(h, (b as usize).max(1)),
        None => heff_order1_quadrature(h, 4000),
    }
}

/// `H_0` plus the first-order correction.
pub fn heff_first_order<T: Real>(h: &PeriodicHamiltonian<T>) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    let h0 = heff_order0(h);
    let h1 = heff_order1(h)?;
    Ok(EffectiveHamiltonian {
        matrix: &h0.matrix + &h1.matrix,
        order: EffectiveOrder::ZeroPlusOne,
        period: h.period(),
        provenance: h1.provenance,
    })
}

fn from_log<T: Real>(
    u: &ComplexMatrix<T>,
    period: T,
    settings: &NumericsSettings<T>,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    let log = logm_unitary_with(u, settings)?;
    Ok(EffectiveHamiltonian {
        matrix: log.scale_real(T::one() / period),
        order: EffectiveOrder::Numeric,
        period,
        provenance: Provenance::NumericLog,
    })
}

/// `i log U(T) / T` with the midpoint (or exact segment) period propagator.
pub fn heff_numeric<T: Real>(
    h: &PeriodicHamiltonian<T>,
    steps_per_period: usize,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    let u = period_propagator(h, steps_per_period)?;
    from_log(&u, h.period(), &NumericsSettings::default())
}

/// `i log U(T) / T` with the adaptive fourth-order propagator.
pub fn heff_numeric_converged<T: Real>(
    h: &PeriodicHamiltonian<T>,
    settings: &NumericsSettings<T>,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    let u = converged_period_propagator(h, settings)?.unitary;
    from_log(&u, h.period(), settings)
}

/// `||U(T) - e^{-i H_eff T}||` for the Magnus truncation at `order` (0 or 1).
pub fn truncation_error<T: Real>(h: &PeriodicHamiltonian<T>, order: u8) -> Result<T, MagnusError> {
    truncation_error_with(h, order, &NumericsSettings::default())
}

pub fn truncation_error_with<T: Real>(
    h: &PeriodicHamiltonian<T>,
    order: u8,
    settings: &NumericsSettings<T>,
) -> Result<T, MagnusError> {
    let heff = match order {
        0 => heff_order0(h),
        1 => heff_first_order(h)?,
        _ => {
            return Err(MagnusError::InvalidArgument(format!(
                "truncation order {order} not supported"
            )))
        }
    };
    let u = converged_period_propagator(h, settings)?.unitary;
    let approx = crate::linalg::expm_hermitian_with(&heff.matrix.hermitian_part(), h.period(), settings)?;
    Ok(operator_norm(&(&u - &approx)))
}
