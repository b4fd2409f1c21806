//! Hermitian eigendecomposition: Householder reduction to tridiagonal form,
//! a diagonal phase change that makes the tridiagonal real, then implicit QL.

use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::scalar::{lit, re, Real};

const MAX_QL_SWEEPS: usize = 60;

/// `H = V diag(values) V^dagger` with ascending eigenvalues and orthonormal columns of `V`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Decomposes the Hermitian part of `h`; the caller is responsible for
    /// checking hermiticity.
    pub fn new(h: &ComplexMatrix<T>) -> Result<Self, LinalgError> {
        let n = h.dim();
        let mut a = h.hermitian_part();
        let mut q = ComplexMatrix::identity(n);
        tridiagonalize(&mut a, &mut q);

        let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        let mut e = vec![T::zero(); n];
        // Column phases D with D^dagger T D real and non-negative off the diagonal.
        let mut phase = Complex::new(T::one(), T::zero());
        let mut w = q;
        for i in 0..n.saturating_sub(1) {
            let sub = a[(i + 1, i)];
            let r = sub.norm();
            e[i] = r;
            if r > T::zero() {
                phase = phase * (sub / r);
            }
            for k in 0..n {
                w[(k, i + 1)] = w[(k, i + 1)] * phase;
            }
        }

        tql(&mut d, &mut e, &mut w)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&k| d[k]).collect();
        let vectors = ComplexMatrix::from_fn(n, |i, j| w[(i, order[j])]);
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn apply(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc = acc + v[(i, k)] * fv[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Reassembles `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply(re)
    }

    /// Column `k` of `V`.
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Reduces Hermitian `a` in place to tridiagonal form `Q^dagger A Q`,
/// accumulating the reflections into `q`.
fn tridiagonalize<T: Real>(a: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>) {
    let n = a.dim();
    let two = lit::<T>(2.0);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex<T>> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let alpha = (x[0].norm_sqr() + tail).sqrt();
        let x0n = x[0].norm();
        let ph = if x0n > T::zero() {
            x[0] / x0n
        } else {
            Complex::new(T::one(), T::zero())
        };
        let mut v = x;
        v[0] = v[0] + ph * alpha;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = two / vnorm2;

        // p = beta B v on the trailing block B.
        let mut p = vec![Complex::zero(); len];
        for i in 0..len {
            let mut acc = Complex::zero();
            for j in 0..len {
                acc = acc + a[(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = acc * beta;
        }
        let vp = v
            .iter()
            .zip(&p)
            .fold(Complex::zero(), |acc, (vi, pi)| acc + vi.conj() * pi);
        let kk = vp * (beta / two);
        let qv: Vec<Complex<T>> = p.iter().zip(&v).map(|(pi, vi)| *pi - *vi * kk).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * qv[j].conj() + qv[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] = a[(k + 1 + i, k + 1 + j)] - upd;
            }
        }
        let new_sub = -(ph * alpha);
        a[(k + 1, k)] = new_sub;
        a[(k, k + 1)] = new_sub.conj();
        for i in 1..len {
            a[(k + 1 + i, k)] = Complex::zero();
            a[(k, k + 1 + i)] = Complex::zero();
        }

        // Q <- Q (I - beta v v^dagger) on columns k+1..n.
        for r in 0..n {
            let mut qv_r = Complex::zero();
            for j in 0..len {
                qv_r = qv_r + q[(r, k + 1 + j)] * v[j];
            }
            let s = qv_r * beta;
            for j in 0..len {
                q[(r, k + 1 + j)] = q[(r, k + 1 + j)] - s * v[j].conj();
            }
        }
    }
}

/// Implicit QL with Wilkinson-type shifts on the real symmetric tridiagonal
/// `(d, e)`, where `e[i]` couples `i` and `i + 1`. Rotations are applied to
/// the columns of `z`.
fn tql<T: Real>(d: &mut [T], e: &mut [T], z: &mut ComplexMatrix<T>) -> Result<(), LinalgError> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    let two = lit::<T>(2.0);
    let eps = T::epsilon();
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(LinalgError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    let zi = z[(k, i)];
                    z[(k, i + 1)] = zi * s + f * c;
                    z[(k, i)] = zi * c - f * s;
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
