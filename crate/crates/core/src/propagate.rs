//! Time-ordered period propagators and stroboscopic/static evolution.

use num_complex::Complex;
use thiserror::Error;

use crate::linalg::{expm_hermitian_with, operator_norm, ComplexMatrix, HermitianEigen, LinalgError, StateVector};
use crate::model::{fraction_to, PeriodicHamiltonian, StaticHamiltonian};
use crate::scalar::{cis, from_usize, lit, to_f64, Real};
use crate::settings::NumericsSettings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("steps_per_period must be at least 1")]
    InvalidSteps,
    #[error("times must be ascending and start at 0")]
    InvalidTimes,
    #[error("state dimension {state} does not match Hamiltonian dimension {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },
    #[error("period propagator not converged at {steps} steps per period (change {residual:e})")]
    ConvergenceCap { steps: usize, residual: f64 },
}

/// States sampled at `times`, with their site distributions.
#[derive(Clone, Debug)]
pub struct EvolutionRecord<T> {
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
    pub probabilities: Vec<Vec<T>>,
    pub period_unitary: Option<ComplexMatrix<T>>,
}

impl<T: Real> EvolutionRecord<T> {
    fn from_states(times: Vec<T>, states: Vec<StateVector<T>>, period_unitary: Option<ComplexMatrix<T>>) -> Self {
        let probabilities = states.iter().map(StateVector::probabilities).collect();
        Self {
            times,
            states,
            probabilities,
            period_unitary,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Probability of `site` at every recorded time.
    pub fn site_trace(&self, site: usize) -> Vec<T> {
        self.probabilities.iter().map(|p| p[site]).collect()
    }

    pub fn final_distribution(&self) -> &[T] {
        self.probabilities.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Sub-intervals `[a, b]` of the unit period between drive breakpoints,
/// each paired with its share of `steps` (at least one).
fn sub_intervals<T: Real>(h: &PeriodicHamiltonian<T>, steps: usize) -> Vec<(T, T, usize)> {
    h.breakpoints()
        .windows(2)
        .map(|w| {
            let a = fraction_to::<T>(w[0]);
            let b = fraction_to::<T>(w[1]);
            let share = (to_f64(b - a) * steps as f64).round() as usize;
            (a, b, share.max(1))
        })
        .collect()
}

/// Exact product over constant pieces, latest factor leftmost.
fn segment_product<T: Real>(
    segments: &[(ComplexMatrix<T>, T)],
    settings: &NumericsSettings<T>,
) -> Result<ComplexMatrix<T>, PropagateError> {
    let n = segments[0].0.dim();
    let mut u = ComplexMatrix::identity(n);
    for (hk, dt) in segments {
        u = expm_hermitian_with(hk, *dt, settings)?.matmul(&u);
    }
    Ok(u)
}

fn exp_step<T: Real>(k: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, PropagateError> {
    Ok(HermitianEigen::new(&k.hermitian_part())?.apply(|x| cis(-x)))
}

/// `U(T)` with the second-order midpoint rule `prod_k e^{-i H(t_k + delta/2) delta}`;
/// exact segment product when every drive is piecewise constant.
pub fn period_propagator<T: Real>(
    h: &PeriodicHamiltonian<T>,
    steps_per_period: usize,
) -> Result<ComplexMatrix<T>, PropagateError> {
    if steps_per_period == 0 {
        return Err(PropagateError::InvalidSteps);
    }
    let settings = NumericsSettings::default();
    if let Some(segs) = h.segments() {
        return segment_product(&segs, &settings);
    }
    let period = h.period();
    let half = lit::<T>(0.5);
    let mut u = ComplexMatrix::identity(h.dim());
    for (a, b, n) in sub_intervals(h, steps_per_period) {
        let ds = (b - a) / from_usize(n);
        for k in 0..n {
            let s = a + (from_usize::<T>(k) + half) * ds;
            let step = exp_step(&h.at_phase(s).scale_real(ds * period))?;
            u = step.matmul(&u);
        }
    }
    Ok(u)
}

/// `U(T)` with the fourth-order Magnus step on two Gauss points,
/// `K = d/2 (H1 + H2) + i sqrt(3)/12 d^2 [H1, H2]`.
pub fn period_propagator_magnus4<T: Real>(
    h: &PeriodicHamiltonian<T>,
    steps_per_period: usize,
) -> Result<ComplexMatrix<T>, PropagateError> {
    if steps_per_period == 0 {
        return Err(PropagateError::InvalidSteps);
    }
    let settings = NumericsSettings::default();
    if let Some(segs) = h.segments() {
        return segment_product(&segs, &settings);
    }
    let period = h.period();
    let half = lit::<T>(0.5);
    let offset = lit::<T>(3.0).sqrt() / lit(6.0);
    let (c1, c2) = (half - offset, half + offset);
    let comm_coef = lit::<T>(3.0).sqrt() / lit(12.0);
    let mut u = ComplexMatrix::identity(h.dim());
    for (a, b, n) in sub_intervals(h, steps_per_period) {
        let ds = (b - a) / from_usize(n);
        let dt = ds * period;
        for k in 0..n {
            let s0 = a + from_usize::<T>(k) * ds;
            let h1 = h.at_phase(s0 + c1 * ds);
            let h2 = h.at_phase(s0 + c2 * ds);
            let comm = h1.commutator(&h2).scale(Complex::new(T::zero(), comm_coef * dt * dt));
            let k_mat = &(&h1 + &h2).scale_real(dt * half) + &comm;
            u = exp_step(&k_mat)?.matmul(&u);
        }
    }
    Ok(u)
}

/// Result of the adaptive period propagator.
#[derive(Clone, Debug)]
pub struct ConvergedPropagator<T> {
    pub unitary: ComplexMatrix<T>,
    /// Steps per period of the accepted result; 0 for the exact segment product.
    pub steps_per_period: usize,
    /// Operator-norm change against the previous halving.
    pub residual: T,
}

/// Fourth-order Magnus propagator with step doubling until successive
/// results differ by less than `settings.convergence_tol`.
pub fn converged_period_propagator<T: Real>(
    h: &PeriodicHamiltonian<T>,
    settings: &NumericsSettings<T>,
) -> Result<ConvergedPropagator<T>, PropagateError> {
    if let Some(segs) = h.segments() {
        return Ok(ConvergedPropagator {
            unitary: segment_product(&segs, settings)?,
            steps_per_period: 0,
            residual: T::zero(),
        });
    }
    let mut steps = settings.initial_steps.max(1);
    let mut prev = period_propagator_magnus4(h, steps)?;
    let mut residual = f64::NAN;
    loop {
        let next_steps = steps * 2;
        if next_steps > settings.max_steps {
            return Err(PropagateError::ConvergenceCap { steps, residual });
        }
        let next = period_propagator_magnus4(h, next_steps)?;
        let change = operator_norm(&(&next - &prev));
        if change < settings.convergence_tol {
            return Ok(ConvergedPropagator {
                unitary: next,
                steps_per_period: next_steps,
                residual: change,
            });
        }
        residual = to_f64(change);
        steps = next_steps;
        prev = next;
    }
}

fn check_dim<T: Real>(psi: &StateVector<T>, dim: usize) -> Result<(), PropagateError> {
    if psi.dim() == dim {
        Ok(())
    } else {
        Err(PropagateError::DimensionMismatch {
            state: psi.dim(),
            hamiltonian: dim,
        })
    }
}

/// States `U^k psi0` for `k = 0..=periods` at times `kT`.
pub fn stroboscopic_from_unitary<T: Real>(
    unitary: &ComplexMatrix<T>,
    period: T,
    psi0: &StateVector<T>,
    periods: usize,
) -> Result<EvolutionRecord<T>, PropagateError> {
    check_dim(psi0, unitary.dim())?;
    let mut states = Vec::with_capacity(periods + 1);
    states.push(psi0.clone());
    for k in 0..periods {
        let next = states[k].evolve(unitary);
        states.push(next);
    }
    let times = (0..=periods).map(|k| from_usize::<T>(k) * period).collect();
    Ok(EvolutionRecord::from_states(times, states, Some(unitary.clone())))
}

/// Stroboscopic dynamics with the midpoint period propagator.
pub fn stroboscopic_evolve<T: Real>(
    h: &PeriodicHamiltonian<T>,
    psi0: &StateVector<T>,
    periods: usize,
    steps_per_period: usize,
) -> Result<EvolutionRecord<T>, PropagateError> {
    check_dim(psi0, h.dim())?;
    let u = period_propagator(h, steps_per_period)?;
    stroboscopic_from_unitary(&u, h.period(), psi0, periods)
}

/// `e^{-iHt} psi0` at every requested time from one eigendecomposition.
pub fn evolve_hermitian<T: Real>(
    h: &ComplexMatrix<T>,
    psi0: &StateVector<T>,
    times: &[T],
) -> Result<EvolutionRecord<T>, PropagateError> {
    check_dim(psi0, h.dim())?;
    if times.is_empty() || times[0] != T::zero() || times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(PropagateError::InvalidTimes);
    }
    crate::linalg::check_hermitian(h, NumericsSettings::<T>::default().hermitian_tol)?;
    let eig = HermitianEigen::new(h)?;
    let n = h.dim();
    // Coefficients of psi0 in the eigenbasis.
    let coeffs: Vec<Complex<T>> = (0..n)
        .map(|k| crate::linalg::dot(&eig.vector(k), psi0.amplitudes()))
        .collect();
    let states = times
        .iter()
        .map(|&t| {
            if t == T::zero() {
                return psi0.clone();
            }
            let mut amps = vec![Complex::new(T::zero(), T::zero()); n];
            for k in 0..n {
                let ck = coeffs[k] * cis(-eig.values[k] * t);
                for (i, a) in amps.iter_mut().enumerate() {
                    *a = *a + eig.vectors[(i, k)] * ck;
                }
            }
            StateVector::from_raw(amps)
        })
        .collect();
    Ok(EvolutionRecord::from_states(times.to_vec(), states, None))
}

pub fn evolve_static<T: Real>(
    h: &StaticHamiltonian<T>,
    psi0: &StateVector<T>,
    times: &[T],
) -> Result<EvolutionRecord<T>, PropagateError> {
    evolve_hermitian(&h.matrix(), psi0, times)
}

/// Distribution `|e^{-iHt} psi0|^2` at a single time.
pub fn distribution_at<T: Real>(h: &ComplexMatrix<T>, psi0: &StateVector<T>, t: T) -> Result<Vec<T>, PropagateError> {
    let rec = evolve_hermitian(h, psi0, &[T::zero(), t])?;
    Ok(rec.probabilities[1].clone())
}
