use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::ComplexMatrix;
use crate::magnus::{EffectiveHamiltonian, EffectiveOrder, MagnusError, Provenance};
use crate::model::{fraction_to, Drive, Fraction, StaticHamiltonian};
use crate::scalar::{cis, exp_integral, from_usize, lit, re, to_f64, Real};

/// Simpson nodes per period for drives without exact phase integrals.
const QUADRATURE_POINTS: usize = 10_000;

/// `V_i(s) / T` for a possibly absent drive.
fn phase_fn<T: Real>(d: Option<&Drive<T>>, s: T) -> T {
    d.map(|d| d.antiderivative(s) - d.antiderivative_mean())
        .unwrap_or_else(T::zero)
}

/// `<exp(i (V_i - V_j))>_T` with `V_i(t) = int_0^t beta_i - <int_0^t beta_i>_T`;
/// `None` stands for an undriven node.
pub fn coupling_renormalization<T: Real>(
    beta_i: Option<&Drive<T>>,
    beta_j: Option<&Drive<T>>,
    period: T,
) -> Complex<T> {
    let mut bps: Vec<Fraction> = vec![Fraction::from_integer(0), Fraction::from_integer(1)];
    for d in [beta_i, beta_j].into_iter().flatten() {
        bps.extend(d.breakpoints());
    }
    bps.sort();
    bps.dedup();
    let phase = |s: T| period * (phase_fn(beta_i, s) - phase_fn(beta_j, s));
    let exact = [beta_i, beta_j].into_iter().flatten().all(Drive::is_piecewise_constant);
    let half = lit::<T>(0.5);
    let mut acc = Complex::zero();
    for w in bps.windows(2) {
        let a = fraction_to::<T>(w[0]);
        let b = fraction_to::<T>(w[1]);
        if exact {
            // Linear phase on the piece: exact exponential integral.
            let mid = (a + b) * half;
            let slope = period
                * (beta_i.map(|d| d.at_phase(mid)).unwrap_or_else(T::zero)
                    - beta_j.map(|d| d.at_phase(mid)).unwrap_or_else(T::zero));
            acc = acc + cis(phase(a) - slope * a) * exp_integral(slope, a, b);
        } else {
            let mut n = ((to_f64(b - a) * QUADRATURE_POINTS as f64).ceil() as usize).max(2);
            if n % 2 == 1 {
                n += 1;
            }
            let h = (b - a) / from_usize(n);
            let mut sum = Complex::zero();
            for k in 0..=n {
                let weight = if k == 0 || k == n {
                    T::one()
                } else if k % 2 == 1 {
                    lit(4.0)
                } else {
                    lit(2.0)
                };
                sum = sum + cis(phase(a + from_usize::<T>(k) * h)) * weight;
            }
            acc = acc + sum * (h / lit(3.0));
        }
    }
    acc
}

/// `V_i(0)` for every node: the constant gauge separating the rotating frame
/// from the lab frame at stroboscopic times.
pub fn rotating_frame_offsets<T: Real>(dim: usize, onsite_drives: &BTreeMap<usize, Drive<T>>, period: T) -> Vec<T> {
    (0..dim)
        .map(|i| {
            -period
                * onsite_drives
                    .get(&i)
                    .map(|d| d.antiderivative_mean())
                    .unwrap_or_else(T::zero)
        })
        .collect()
}

/// Rotating-frame effective Hamiltonian `sum J_ij <exp(i V_ij)>_T |i><j|`.
/// Undriven nodes keep their skeleton on-site energy; driven nodes have it
/// absorbed into the frame.
pub fn rotated_effective_couplings<T: Real>(
    skeleton: &StaticHamiltonian<T>,
    onsite_drives: &BTreeMap<usize, Drive<T>>,
    period: T,
) -> Result<EffectiveHamiltonian<T>, MagnusError> {
    if !(period > T::zero()) {
        return Err(MagnusError::InvalidArgument("period must be positive".into()));
    }
    for &i in onsite_drives.keys() {
        if i >= skeleton.dim() {
            return Err(MagnusError::InvalidArgument(format!("drive on missing node {i}")));
        }
    }
    let n = skeleton.dim();
    let mut m = ComplexMatrix::zeros(n);
    for (i, &e) in skeleton.onsite().iter().enumerate() {
        if !onsite_drives.contains_key(&i) {
            m[(i, i)] = re(e);
        }
    }
    for (i, j, jij) in skeleton.edges() {
        if jij.im != T::zero() {
            return Err(MagnusError::ComplexSkeleton(i, j));
        }
        let factor = coupling_renormalization(onsite_drives.get(&i), onsite_drives.get(&j), period);
        let z = factor * jij.re;
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    }
    Ok(EffectiveHamiltonian {
        matrix: m,
        order: EffectiveOrder::Zero,
        period,
        provenance: Provenance::RotatingFrame,
    })
}

/// Lab-frame form `V(0)^dagger H_eff V(0)` of a rotating-frame effective
/// Hamiltonian, comparable with `U(T)^m` at stroboscopic times.
pub fn lab_frame_effective<T: Real>(
    rotated: &EffectiveHamiltonian<T>,
    onsite_drives: &BTreeMap<usize, Drive<T>>,
) -> EffectiveHamiltonian<T> {
    let offsets = rotating_frame_offsets(rotated.dim(), onsite_drives, rotated.period);
    let m = ComplexMatrix::from_fn(rotated.dim(), |i, j| {
        rotated.matrix[(i, j)] * cis(offsets[j] - offsets[i])
    });
    EffectiveHamiltonian {
        matrix: m,
        ..rotated.clone()
    }
}
