use std::str::FromStr;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::model::ModelError;
use crate::scalar::{exp_integral, from_usize, lit, Real};

/// Exact fraction of the period.
pub type Fraction = Ratio<i64>;

pub(crate) fn fraction_to<T: Real>(f: Fraction) -> T {
    T::from_i64(*f.numer()).expect("numerator representable")
        / T::from_i64(*f.denom()).expect("denominator representable")
}

/// Position inside the period, `t/T - floor(t/T)` in `[0, 1)`.
pub fn reduced_phase<T: Real>(t: T, period: T) -> T {
    let x = t / period;
    let s = x - x.floor();
    if s >= T::one() || s < T::zero() {
        T::zero()
    } else {
        s
    }
}

/// One term `amplitude * cos(l * Omega * t + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct Harmonic<T> {
    pub l: u32,
    pub amplitude: T,
    pub phase: T,
}

impl<T: Real> Harmonic<T> {
    pub fn new(l: u32, amplitude: T, phase: T) -> Self {
        Self { l, amplitude, phase }
    }
}

/// Piecewise-constant function of the period fraction.
#[derive(Clone, Debug, PartialEq)]
pub struct Piecewise<T> {
    breakpoints: Vec<Fraction>,
    values: Vec<T>,
}

impl<T: Real> Piecewise<T> {
    pub fn breakpoints(&self) -> &[Fraction] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn bounds(&self, k: usize) -> (T, T) {
        (fraction_to(self.breakpoints[k]), fraction_to(self.breakpoints[k + 1]))
    }
}

/// `dc + sum_l J_l cos(l Omega t + phi_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSeries<T> {
    dc: T,
    harmonics: Vec<Harmonic<T>>,
}

impl<T: Real> HarmonicSeries<T> {
    pub fn dc(&self) -> T {
        self.dc
    }

    pub fn harmonics(&self) -> &[Harmonic<T>] {
        &self.harmonics
    }

    pub fn max_harmonic(&self) -> u32 {
        self.harmonics.iter().map(|h| h.l).max().unwrap_or(0)
    }
}

/// `amplitude * sin(rate * Omega * t)` for `t/T` in `[start, end)`, zero
/// elsewhere in the period; `t` is taken modulo `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedSine<T> {
    amplitude: T,
    rate: T,
    start: Fraction,
    end: Fraction,
}

impl<T: Real> WindowedSine<T> {
    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn window(&self) -> (Fraction, Fraction) {
        (self.start, self.end)
    }

    /// Angular frequency per unit period fraction.
    fn w(&self) -> T {
        self.rate * T::TAU()
    }
}

/// A real `T`-periodic scalar function, parametrised by the period fraction
/// `s = t/T mod 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DriveDoc<T>", into = "DriveDoc<T>", bound = "T: Real")]
pub enum Drive<T> {
    PiecewiseConstant(Piecewise<T>),
    HarmonicSeries(HarmonicSeries<T>),
    WindowedSine(WindowedSine<T>),
}

impl<T: Real> Drive<T> {
    /// `values[k]` on `[breakpoints[k], breakpoints[k+1])`.
    pub fn piecewise(breakpoints: Vec<Fraction>, values: Vec<T>) -> Result<Self, ModelError> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(ModelError::InvalidDrive(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != Fraction::zero() || *breakpoints.last().unwrap() != Fraction::one() {
            return Err(ModelError::InvalidDrive(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::InvalidDrive(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidDrive("non-finite drive value".into()));
        }
        Ok(Drive::PiecewiseConstant(Piecewise { breakpoints, values }))
    }

    /// Equal-length segments.
    pub fn steps(values: Vec<T>) -> Result<Self, ModelError> {
        let n = values.len() as i64;
        if n == 0 {
            return Err(ModelError::InvalidDrive("no segments".into()));
        }
        let breakpoints = (0..=n).map(|k| Fraction::new(k, n)).collect();
        Self::piecewise(breakpoints, values)
    }

    pub fn constant(value: T) -> Self {
        Drive::PiecewiseConstant(Piecewise {
            breakpoints: vec![Fraction::zero(), Fraction::one()],
            values: vec![value],
        })
    }

    pub fn harmonic(dc: T, harmonics: Vec<Harmonic<T>>) -> Result<Self, ModelError> {
        let mut seen: Vec<u32> = Vec::with_capacity(harmonics.len());
        for h in &harmonics {
            if h.l == 0 {
                return Err(ModelError::InvalidDrive("harmonic index must be positive".into()));
            }
            if seen.contains(&h.l) {
                return Err(ModelError::InvalidDrive(format!("harmonic index {} repeated", h.l)));
            }
            if !h.amplitude.is_finite() || !h.phase.is_finite() {
                return Err(ModelError::InvalidDrive("non-finite harmonic".into()));
            }
            seen.push(h.l);
        }
        if !dc.is_finite() {
            return Err(ModelError::InvalidDrive("non-finite dc term".into()));
        }
        Ok(Drive::HarmonicSeries(HarmonicSeries { dc, harmonics }))
    }

    pub fn windowed_sine(amplitude: T, rate: T, start: Fraction, end: Fraction) -> Result<Self, ModelError> {
        if start < Fraction::zero() || end > Fraction::one() || start >= end {
            return Err(ModelError::InvalidDrive(
                "sine window must satisfy 0 <= start < end <= 1".into(),
            ));
        }
        if !amplitude.is_finite() || !rate.is_finite() {
            return Err(ModelError::InvalidDrive("non-finite sine parameter".into()));
        }
        Ok(Drive::WindowedSine(WindowedSine {
            amplitude,
            rate,
            start,
            end,
        }))
    }

    /// Value at period fraction `s` in `[0, 1)`.
    pub fn at_phase(&self, s: T) -> T {
        match self {
            Drive::PiecewiseConstant(p) => {
                let k = p
                    .breakpoints
                    .iter()
                    .skip(1)
                    .position(|&b| s < fraction_to(b))
                    .unwrap_or(p.values.len() - 1);
                p.values[k]
            }
            Drive::HarmonicSeries(h) => {
                let x = T::TAU() * s;
                h.harmonics.iter().fold(h.dc, |acc, m| {
                    acc + m.amplitude * (from_usize::<T>(m.l as usize) * x + m.phase).cos()
                })
            }
            Drive::WindowedSine(w) => {
                if s >= fraction_to(w.start) && s < fraction_to(w.end) {
                    w.amplitude * (w.w() * s).sin()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Value at time `t` for period `period`.
    pub fn value(&self, t: T, period: T) -> T {
        self.at_phase(reduced_phase(t, period))
    }

    /// Period fractions where the drive may be non-smooth, including 0 and 1.
    pub fn breakpoints(&self) -> Vec<Fraction> {
        match self {
            Drive::PiecewiseConstant(p) => p.breakpoints.clone(),
            Drive::HarmonicSeries(_) => vec![Fraction::zero(), Fraction::one()],
            Drive::WindowedSine(w) => {
                let mut b = vec![Fraction::zero(), w.start, w.end, Fraction::one()];
                b.dedup();
                b
            }
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, Drive::PiecewiseConstant(_))
    }

    /// `int_0^1 beta(s) e^{-2 pi i l s} ds`.
    pub fn fourier(&self, l: i64) -> Complex<T> {
        let lf = T::from_i64(l).expect("harmonic index representable");
        let w = -T::TAU() * lf;
        match self {
            Drive::PiecewiseConstant(p) => (0..p.values.len()).fold(Complex::zero(), |acc, k| {
                let (a, b) = p.bounds(k);
                acc + exp_integral(w, a, b) * p.values[k]
            }),
            Drive::HarmonicSeries(h) => {
                let mut out = if l == 0 {
                    Complex::new(h.dc, T::zero())
                } else {
                    Complex::zero()
                };
                let half = lit::<T>(0.5);
                for m in &h.harmonics {
                    if i64::from(m.l) == l {
                        out = out + Complex::from_polar(m.amplitude * half, m.phase);
                    }
                    if -i64::from(m.l) == l {
                        out = out + Complex::from_polar(m.amplitude * half, -m.phase);
                    }
                }
                out
            }
            Drive::WindowedSine(s) => {
                let (a, b) = (fraction_to::<T>(s.start), fraction_to::<T>(s.end));
                let ws = s.w();
                let diff = exp_integral(ws + w, a, b) - exp_integral(-ws + w, a, b);
                // sin = (e^{ix} - e^{-ix}) / 2i
                diff * Complex::new(T::zero(), -s.amplitude * lit::<T>(0.5))
            }
        }
    }

    pub fn mean(&self) -> T {
        self.fourier(0).re
    }

    /// `F(s) = int_0^s beta`, in units where the period is 1.
    pub fn antiderivative(&self, s: T) -> T {
        match self {
            Drive::PiecewiseConstant(p) => {
                let mut acc = T::zero();
                for k in 0..p.values.len() {
                    let (a, b) = p.bounds(k);
                    if s <= a {
                        break;
                    }
                    acc = acc + p.values[k] * (s.min(b) - a);
                }
                acc
            }
            Drive::HarmonicSeries(h) => {
                let x = T::TAU() * s;
                h.harmonics.iter().fold(h.dc * s, |acc, m| {
                    let lf = from_usize::<T>(m.l as usize);
                    acc + m.amplitude / (T::TAU() * lf) * ((lf * x + m.phase).sin() - m.phase.sin())
                })
            }
            Drive::WindowedSine(w) => {
                let (a, b) = (fraction_to::<T>(w.start), fraction_to::<T>(w.end));
                if s <= a {
                    return T::zero();
                }
                let ws = w.w();
                let upper = s.min(b);
                if ws == T::zero() {
                    return T::zero();
                }
                w.amplitude / ws * ((ws * a).cos() - (ws * upper).cos())
            }
        }
    }

    /// `int_0^1 F(s) ds`.
    pub fn antiderivative_mean(&self) -> T {
        let half = lit::<T>(0.5);
        match self {
            Drive::PiecewiseConstant(p) => {
                let mut acc = T::zero();
                let mut f = T::zero();
                for k in 0..p.values.len() {
                    let (a, b) = p.bounds(k);
                    let len = b - a;
                    acc = acc + f * len + p.values[k] * len * len * half;
                    f = f + p.values[k] * len;
                }
                acc
            }
            Drive::HarmonicSeries(h) => h.harmonics.iter().fold(h.dc * half, |acc, m| {
                let lf = from_usize::<T>(m.l as usize);
                acc - m.amplitude * m.phase.sin() / (T::TAU() * lf)
            }),
            Drive::WindowedSine(w) => {
                let (a, b) = (fraction_to::<T>(w.start), fraction_to::<T>(w.end));
                let ws = w.w();
                if ws == T::zero() {
                    return T::zero();
                }
                let k = w.amplitude / ws;
                let inside = k * ((ws * a).cos() * (b - a) - ((ws * b).sin() - (ws * a).sin()) / ws);
                let after = k * ((ws * a).cos() - (ws * b).cos()) * (T::one() - b);
                inside + after
            }
        }
    }

    /// Largest `|beta|` over the period (exact for piecewise and sine, a bound for harmonics).
    pub fn amplitude(&self) -> T {
        match self {
            Drive::PiecewiseConstant(p) => p.values.iter().fold(T::zero(), |a, v| a.max(v.abs())),
            Drive::HarmonicSeries(h) => h.harmonics.iter().fold(h.dc.abs(), |a, m| a + m.amplitude.abs()),
            Drive::WindowedSine(w) => w.amplitude.abs(),
        }
    }

    /// Pointwise difference `self - other`, when both drives share a kind that
    /// is closed under subtraction.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (Drive::PiecewiseConstant(_), Drive::PiecewiseConstant(_)) => {
                let mut bps: Vec<Fraction> = self.breakpoints();
                bps.extend(other.breakpoints());
                bps.sort();
                bps.dedup();
                let values = bps
                    .windows(2)
                    .map(|w| {
                        let mid: T = fraction_to((w[0] + w[1]) / Fraction::from_integer(2));
                        self.at_phase(mid) - other.at_phase(mid)
                    })
                    .collect();
                Self::piecewise(bps, values).ok()
            }
            (Drive::HarmonicSeries(a), Drive::HarmonicSeries(b)) => {
                let mut terms: Vec<Harmonic<T>> = Vec::new();
                let max_l = a.max_harmonic().max(b.max_harmonic());
                for l in 1..=max_l {
                    let c = self.fourier(i64::from(l)) - other.fourier(i64::from(l));
                    if c.norm() > T::zero() {
                        terms.push(Harmonic::new(l, c.norm() * lit(2.0), c.arg()));
                    }
                }
                Self::harmonic(a.dc - b.dc, terms).ok()
            }
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields, bound = "T: Real")]
enum DriveDoc<T> {
    PiecewiseConstant {
        breakpoints: Vec<String>,
        values: Vec<T>,
    },
    HarmonicSeries {
        #[serde(default)]
        dc: T,
        #[serde(default)]
        harmonics: Vec<Harmonic<T>>,
    },
    WindowedSine {
        amplitude: T,
        rate: T,
        start: String,
        end: String,
    },
}

pub(crate) fn parse_fraction(s: &str) -> Result<Fraction, ModelError> {
    let trimmed = s.trim();
    Fraction::from_str(trimmed)
        .or_else(|_| trimmed.parse::<i64>().map(Fraction::from_integer))
        .map_err(|_| ModelError::InvalidDrive(format!("cannot parse fraction {s:?}")))
}

pub(crate) fn format_fraction(f: Fraction) -> String {
    if *f.denom() == 1 {
        f.numer().to_string()
    } else {
        format!("{}/{}", f.numer(), f.denom())
    }
}

impl<T: Real> TryFrom<DriveDoc<T>> for Drive<T> {
    type Error = ModelError;

    fn try_from(doc: DriveDoc<T>) -> Result<Self, ModelError> {
        match doc {
            DriveDoc::PiecewiseConstant { breakpoints, values } => {
                let bps = breakpoints
                    .iter()
                    .map(|s| parse_fraction(s))
                    .collect::<Result<Vec<_>, _>>()?;
                Drive::piecewise(bps, values)
            }
            DriveDoc::HarmonicSeries { dc, harmonics } => Drive::harmonic(dc, harmonics),
            DriveDoc::WindowedSine {
                amplitude,
                rate,
                start,
                end,
            } => Drive::windowed_sine(amplitude, rate, parse_fraction(&start)?, parse_fraction(&end)?),
        }
    }
}

impl<T: Real> From<Drive<T>> for DriveDoc<T> {
    fn from(d: Drive<T>) -> Self {
        match d {
            Drive::PiecewiseConstant(p) => DriveDoc::PiecewiseConstant {
                breakpoints: p.breakpoints.into_iter().map(format_fraction).collect(),
                values: p.values,
            },
            Drive::HarmonicSeries(h) => DriveDoc::HarmonicSeries {
                dc: h.dc,
                harmonics: h.harmonics,
            },
            Drive::WindowedSine(w) => DriveDoc::WindowedSine {
                amplitude: w.amplitude,
                rate: w.rate,
                start: format_fraction(w.start),
                end: format_fraction(w.end),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    fn samples() -> Vec<Drive<f64>> {
        vec![
            Drive::steps(vec![1.5, -2.0, 0.25]).unwrap(),
            Drive::piecewise(
                vec![
                    Fraction::new(0, 1),
                    Fraction::new(1, 5),
                    Fraction::new(7, 10),
                    Fraction::new(1, 1),
                ],
                vec![0.3, -1.0, 2.0],
            )
            .unwrap(),
            Drive::harmonic(0.4, vec![Harmonic::new(1, 0.7, 0.3), Harmonic::new(3, -0.2, 1.1)]).unwrap(),
            Drive::windowed_sine(2.0, 1.5, Fraction::new(1, 3), Fraction::new(1, 1)).unwrap(),
            Drive::windowed_sine(1.0, 1.5, Fraction::new(0, 1), Fraction::new(2, 3)).unwrap(),
        ]
    }

    #[test]
    fn step_values() {
        let b2 = Drive::steps(vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(b2.value(0.5, 3.0), 1.0);
        assert_eq!(b2.value(1.5, 3.0), -1.0);
        assert_eq!(b2.value(2.5, 3.0), 0.0);
        assert_eq!(b2.value(3.5, 3.0), 1.0);
        assert_eq!(b2.value(-0.5, 3.0), 0.0);
    }

    #[test]
    fn sine_window_values() {
        let b3 = Drive::<f64>::windowed_sine(1.0, 1.5, Fraction::new(1, 3), Fraction::new(1, 1)).unwrap();
        assert_eq!(b3.value(0.5, 3.0), 0.0);
        assert!(b3.value(2.0, 3.0).abs() < 1e-15);
        assert!((b3.value(1.75, 3.0) + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fourier_matches_quadrature() {
        for d in samples() {
            for l in -3i64..=3 {
                let re = simpson(|s| d.at_phase(s) * (TAU * l as f64 * s).cos(), 0.0, 1.0, 3 * 20000);
                let im = simpson(|s| -d.at_phase(s) * (TAU * l as f64 * s).sin(), 0.0, 1.0, 3 * 20000);
                let c = d.fourier(l);
                // Quadrature is only first-order accurate across jumps.
                assert!((c.re - re).abs() < 1e-3 && (c.im - im).abs() < 1e-3, "{d:?} l={l}");
            }
        }
        let h = Drive::harmonic(0.0, vec![Harmonic::new(1, 2.0, 0.7)]).unwrap();
        assert!((h.fourier(1) - Complex::from_polar(1.0, 0.7)).norm() < 1e-15);
        assert!((h.fourier(-1) - Complex::from_polar(1.0, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn antiderivative_consistent() {
        for d in samples() {
            for &s in &[0.0, 0.1, 0.3, 1.0 / 3.0, 0.5, 0.8, 0.999] {
                let numeric = simpson(|x| d.at_phase(x), 0.0, s, 2 * 30000);
                assert!((d.antiderivative(s) - numeric).abs() < 1e-4, "{d:?} s={s}");
            }
            let mean = simpson(|x| d.antiderivative(x), 0.0, 1.0, 2 * 30000);
            assert!((d.antiderivative_mean() - mean).abs() < 1e-8, "{d:?}");
            assert!((d.antiderivative(1.0) - d.mean()).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(Drive::<f64>::piecewise(vec![Fraction::new(0, 1), Fraction::new(1, 2)], vec![1.0]).is_err());
        assert!(Drive::<f64>::piecewise(
            vec![
                Fraction::new(0, 1),
                Fraction::new(1, 2),
                Fraction::new(1, 2),
                Fraction::new(1, 1)
            ],
            vec![1.0, 2.0, 3.0]
        )
        .is_err());
        assert!(Drive::<f64>::harmonic(0.0, vec![Harmonic::new(1, 1.0, 0.0), Harmonic::new(1, 1.0, 0.0)]).is_err());
        assert!(Drive::<f64>::harmonic(0.0, vec![Harmonic::new(0, 1.0, 0.0)]).is_err());
        assert!(Drive::<f64>::windowed_sine(1.0, 1.0, Fraction::new(1, 2), Fraction::new(1, 3)).is_err());
    }

    #[test]
    fn json_round_trip() {
        for d in samples() {
            let s = serde_json::to_string(&d).unwrap();
            let back: Drive<f64> = serde_json::from_str(&s).unwrap();
            assert_eq!(back, d);
        }
        let parsed: Drive<f64> = serde_json::from_str(
            r#"{"kind":"piecewise_constant","breakpoints":["0","1/3","2/3","1"],"values":[1,-1,0]}"#,
        )
        .unwrap();
        assert_eq!(parsed, Drive::steps(vec![1.0, -1.0, 0.0]).unwrap());
        assert!(serde_json::from_str::<Drive<f64>>(
            r#"{"kind":"piecewise_constant","breakpoints":["0","x"],"values":[1]}"#
        )
        .is_err());
    }

    #[test]
    fn difference_of_steps() {
        let b2 = Drive::steps(vec![1.0, -1.0, 0.0]).unwrap();
        let b3 = Drive::steps(vec![0.0, -1.0, 1.0]).unwrap();
        let d = b2.difference(&b3).unwrap();
        assert_eq!(d, Drive::steps(vec![1.0, 0.0, -1.0]).unwrap());
        let s = Drive::harmonic(0.0, vec![Harmonic::new(1, 1.0, -PI / 2.0)]).unwrap();
        let z = s.difference(&s).unwrap();
        assert!(z.amplitude() < 1e-15);
    }
}
