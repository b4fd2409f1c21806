use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the whole crate is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{i theta}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_two_pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut r = x % tau;
    if r < T::zero() {
        r = r + tau;
    }
    if r >= tau {
        r = r - tau;
    }
    r
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pi<T: Real>(x: T) -> T {
    let pi = T::PI();
    let r = wrap_two_pi(x);
    if r > pi {
        r - T::TAU()
    } else {
        r
    }
}

/// `int_a^b e^{i w s} ds`, stable as `w -> 0`.
pub(crate) fn exp_integral<T: Real>(w: T, a: T, b: T) -> Complex<T> {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let x = w * half;
    let sinc = if x.abs() < lit(1e-4) {
        T::one() - x * x / lit(6.0)
    } else {
        x.sin() / x
    };
    cis(w * mid) * (lit::<T>(2.0) * half * sinc)
}
