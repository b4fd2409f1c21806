use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::model::{Drive, Fraction, PeriodicHamiltonian, StaticHamiltonian};
use crate::protocols::ProtocolError;
use crate::scalar::{cis, from_usize, lit, to_f64, wrap_two_pi, Real};

/// Shape of the on-site modulation on the triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    Step,
    Sine,
}

fn check_period<T: Real>(period: T) -> Result<(), ProtocolError> {
    if period > T::zero() && period.is_finite() {
        Ok(())
    } else {
        Err(ProtocolError::InvalidParameter("period must be positive".into()))
    }
}

/// `(beta_2, beta_3)`. Step: `{A, -A, 0}` and `{0, -A, A}` on thirds of the
/// period. Sine: `A sin(3 pi t/T)` on `[0, 2T/3)` and on `[T/3, T)`.
pub fn triangle_drives<T: Real>(
    kind: TriangleKind,
    amplitude: T,
    period: T,
) -> Result<(Drive<T>, Drive<T>), ProtocolError> {
    check_period(period)?;
    if !amplitude.is_finite() {
        return Err(ProtocolError::InvalidParameter("amplitude must be finite".into()));
    }
    let pair = match kind {
        TriangleKind::Step => (
            Drive::steps(vec![amplitude, -amplitude, T::zero()])?,
            Drive::steps(vec![T::zero(), -amplitude, amplitude])?,
        ),
        TriangleKind::Sine => {
            let rate = lit::<T>(1.5);
            (
                Drive::windowed_sine(amplitude, rate, Fraction::new(0, 1), Fraction::new(2, 3))?,
                Drive::windowed_sine(amplitude, rate, Fraction::new(1, 3), Fraction::new(1, 1))?,
            )
        }
    };
    Ok(pair)
}

/// Driven triangle: uniform real couplings `J'`, drives on nodes 1 and 2
/// (nodes 2 and 3 of the triangle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct TriangleProtocol<T> {
    pub j_prime: T,
    pub amplitude: T,
    pub period: T,
    pub kind: TriangleKind,
}

impl<T: Real> TriangleProtocol<T> {
    pub fn new(kind: TriangleKind, j_prime: T, amplitude: T, period: T) -> Result<Self, ProtocolError> {
        check_period(period)?;
        if !j_prime.is_finite() || !amplitude.is_finite() {
            return Err(ProtocolError::InvalidParameter("non-finite parameter".into()));
        }
        Ok(Self {
            j_prime,
            amplitude,
            period,
            kind,
        })
    }

    pub fn hamiltonian(&self) -> Result<PeriodicHamiltonian<T>, ProtocolError> {
        let (b2, b3) = triangle_drives(self.kind, self.amplitude, self.period)?;
        let skel = StaticHamiltonian::new(3)?
            .with_real_coupling(0, 1, self.j_prime)?
            .with_real_coupling(1, 2, self.j_prime)?
            .with_real_coupling(2, 0, self.j_prime)?;
        Ok(PeriodicHamiltonian::new(skel, self.period)?
            .with_onsite_drive(1, b2)?
            .with_onsite_drive(2, b3)?)
    }

    pub fn effective_coupling(&self) -> Complex<T> {
        triangle_effective_coupling(self.kind, self.j_prime, self.amplitude, self.period)
    }
}

/// Closed-form rotating-frame coupling `J_12 = J_23 = J_31`.
/// Step: `J' e^{iAT/9} [1/3 + (2i/AT)(e^{-iAT/3} - 1)]`.
/// Sine: `J' [(2/3) J0(AT/3pi) e^{-iAT/9pi} + (1/3) e^{2iAT/9pi}]`.
pub fn triangle_effective_coupling<T: Real>(kind: TriangleKind, j_prime: T, amplitude: T, period: T) -> Complex<T> {
    let x = amplitude * period;
    let third = T::one() / lit(3.0);
    let two_thirds = lit::<T>(2.0) / lit(3.0);
    match kind {
        TriangleKind::Step => {
            // (2i/x)(e^{-ix/3} - 1) = (2/3) sinc(x/6) e^{-ix/6}
            let y = x / lit(6.0);
            let sinc = if y.abs() < lit(1e-8) { T::one() } else { y.sin() / y };
            let bracket = Complex::new(third, T::zero()) + cis(-y) * (two_thirds * sinc);
            cis(x / lit(9.0)) * bracket * j_prime
        }
        TriangleKind::Sine => {
            let pi = T::PI();
            let bessel = bessel_j0(x / (lit::<T>(3.0) * pi));
            let a = cis(-x / (lit::<T>(9.0) * pi)) * (two_thirds * bessel);
            let b = cis(lit::<T>(2.0) * x / (lit::<T>(9.0) * pi)) * third;
            (a + b) * j_prime
        }
    }
}

/// Loop phase `3 Arg(J_eff) mod 2 pi` in `[0, 2 pi)`.
pub fn effective_phase<T: Real>(j_eff: Complex<T>) -> Result<T, ProtocolError> {
    if j_eff.norm() == T::zero() || !j_eff.norm().is_finite() {
        return Err(ProtocolError::ZeroCoupling);
    }
    Ok(wrap_two_pi(lit::<T>(3.0) * j_eff.arg()))
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(8.0) {
        // Ascending series sum_k (-x^2/4)^k / (k!)^2.
        let q = -(ax * ax) / lit(4.0);
        let mut term = T::one();
        let mut sum = T::one();
        let mut k = 1;
        while k < 200 {
            let kf = from_usize::<T>(k);
            term = term * q / (kf * kf);
            sum = sum + term;
            if term.abs() <= T::epsilon() * lit(0.01) * sum.abs().max(lit(1e-3)) {
                break;
            }
            k += 1;
        }
        sum
    } else {
        // (1/pi) int_0^pi cos(x sin t) dt; the trapezoid rule on a smooth
        // periodic integrand converges exponentially once n exceeds |x|.
        let n = to_f64(ax).ceil() as usize + 64;
        let h = T::PI() / from_usize::<T>(n);
        let mut sum = T::zero();
        for k in 0..n {
            let t = h * from_usize::<T>(k);
            sum = sum + (ax * t.sin()).cos();
        }
        sum / from_usize::<T>(n)
    }
}
