//! Diagnostics on static walks: transition probabilities, time-reversal
//! asymmetry, gauge freedom, distribution shape.

use std::collections::VecDeque;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{check_hermitian, ComplexMatrix, HermitianEigen, LinalgError};
use crate::model::{ModelError, StaticHamiltonian};
use crate::scalar::{cis, from_usize, lit, wrap_pi, Real};
use crate::settings::NumericsSettings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("node {node} out of range for dimension {dim}")]
    NodeOutOfRange { node: usize, dim: usize },
    #[error("center {center} outside a distribution of length {len}")]
    CenterOutOfRange { center: usize, len: usize },
    #[error("distributions have sizes {left} and {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("need {expected} gauge phases, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-node phases `phi_i`, applied as `|i> -> e^{i phi_i} |i>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Real")]
pub struct GaugePhases<T>(pub Vec<T>);

impl<T: Real> GaugePhases<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `P[i][j] = |<j| e^{-iHt} |i>|^2` for all pairs.
pub fn transition_matrix<T: Real>(h: &StaticHamiltonian<T>, t: T) -> Result<Vec<Vec<T>>, AnalysisError> {
    let eig = HermitianEigen::new(&h.matrix())?;
    Ok(probabilities_from(&eig, t))
}

fn probabilities_from<T: Real>(eig: &HermitianEigen<T>, t: T) -> Vec<Vec<T>> {
    let u = eig.apply(|x| cis(-x * t));
    let n = u.dim();
    (0..n).map(|i| (0..n).map(|j| u[(j, i)].norm_sqr()).collect()).collect()
}

/// `|<j| e^{-iHt} |i>|^2`.
pub fn transition_probability<T: Real>(h: &StaticHamiltonian<T>, i: usize, j: usize, t: T) -> Result<T, AnalysisError> {
    let dim = h.dim();
    for node in [i, j] {
        if node >= dim {
            return Err(AnalysisError::NodeOutOfRange { node, dim });
        }
    }
    Ok(transition_matrix(h, t)?[i][j])
}

/// 50 points on `(0, 5 / max|J|]`.
pub fn default_trs_grid<T: Real>(h: &StaticHamiltonian<T>) -> Vec<T> {
    let jmax = h.edges().map(|(_, _, z)| z.norm()).fold(T::zero(), T::max);
    let unit = if jmax > T::zero() { T::one() / jmax } else { T::one() };
    (1..=50).map(|k| from_usize::<T>(k) * lit::<T>(0.1) * unit).collect()
}

/// `max_{i,j,t} |P_{i->j}(t) - P_{j->i}(t)|`.
pub fn trs_asymmetry<T: Real>(h: &StaticHamiltonian<T>, t_grid: &[T]) -> Result<T, AnalysisError> {
    let eig = HermitianEigen::new(&h.matrix())?;
    let mut worst = T::zero();
    for &t in t_grid {
        let p = probabilities_from(&eig, t);
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                worst = worst.max((p[i][j] - p[j][i]).abs());
            }
        }
    }
    Ok(worst)
}

/// `J_ij -> e^{i(phi_i - phi_j)} J_ij`; on-site energies unchanged.
pub fn gauge_transform<T: Real>(
    h: &StaticHamiltonian<T>,
    phases: &GaugePhases<T>,
) -> Result<StaticHamiltonian<T>, AnalysisError> {
    if phases.len() != h.dim() {
        return Err(AnalysisError::LengthMismatch {
            expected: h.dim(),
            got: phases.len(),
        });
    }
    let mut out = h.clone();
    for (i, j, z) in h.edges() {
        out.set_coupling(i, j, z * cis(phases.0[i] - phases.0[j]))?;
    }
    Ok(out)
}

/// Whether some gauge makes every coupling real. A breadth-first spanning
/// forest (lowest index first) fixes the phases so tree couplings become
/// positive; each remaining edge must then have phase 0 or pi within `1e-8`.
/// Returns the witness phases on success.
pub fn gauge_real_reducible<T: Real>(h: &StaticHamiltonian<T>) -> (bool, Option<GaugePhases<T>>) {
    let n = h.dim();
    let mut phi: Vec<Option<T>> = vec![None; n];
    let mut tree = vec![vec![false; n]; n];
    for root in 0..n {
        if phi[root].is_some() {
            continue;
        }
        phi[root] = Some(T::zero());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let pu = phi[u].unwrap_or_else(T::zero);
            for v in h.neighbors(u) {
                let z = h.coupling(u, v);
                if phi[v].is_none() && z.norm() > T::zero() {
                    // e^{i(phi_u - phi_v)} J_uv real positive.
                    phi[v] = Some(pu + z.arg());
                    tree[u][v] = true;
                    tree[v][u] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let phases: Vec<T> = phi.into_iter().map(|p| p.unwrap_or_else(T::zero)).collect();
    let tol = lit::<T>(1e-8);
    for (i, j, z) in h.edges() {
        if tree[i][j] || z.norm() == T::zero() {
            continue;
        }
        let a = wrap_pi(z.arg() + phases[i] - phases[j]);
        let off = a.abs().min(T::PI() - a.abs());
        if off > tol {
            return (false, None);
        }
    }
    (true, Some(GaugePhases(phases.into_iter().map(wrap_pi).collect())))
}

/// `sum_{j >= 1} |p(c + j) - p(c - j)|`, sites beyond either end counting as 0.
pub fn reflection_asymmetry<T: Real>(p: &[T], center: usize) -> Result<T, AnalysisError> {
    if center >= p.len() {
        return Err(AnalysisError::CenterOutOfRange { center, len: p.len() });
    }
    let at = |k: isize| -> T {
        if k >= 0 && (k as usize) < p.len() {
            p[k as usize]
        } else {
            T::zero()
        }
    };
    let c = center as isize;
    let reach = center.max(p.len() - 1 - center) as isize;
    Ok((1..=reach).map(|j| (at(c + j) - at(c - j)).abs()).sum())
}

/// `E_k = 2|K1| cos(2 pi k/N) - 2|K2| sin(4 pi k/N)`.
pub fn dispersion_1d<T: Real>(k1_abs: T, k2_abs: T, n: usize, k: usize) -> Result<T, AnalysisError> {
    if k >= n {
        return Err(AnalysisError::InvalidArgument(format!("k = {k} not below N = {n}")));
    }
    let x = T::TAU() * from_usize::<T>(k) / from_usize::<T>(n);
    Ok(lit::<T>(2.0) * k1_abs * x.cos() - lit::<T>(2.0) * k2_abs * (lit::<T>(2.0) * x).sin())
}

/// `(1/2) sum |p_i - q_i|`.
pub fn total_variation<T: Real>(p: &[T], q: &[T]) -> Result<T, AnalysisError> {
    if p.len() != q.len() {
        return Err(AnalysisError::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let s: T = p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum();
    Ok(s * lit(0.5))
}

fn chain_1d<T: Real>(
    n: usize,
    k1: Complex<T>,
    k2: Complex<T>,
    periodic: bool,
) -> Result<StaticHamiltonian<T>, AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::InvalidArgument("chain needs at least 3 nodes".into()));
    }
    let mut m = ComplexMatrix::zeros(n);
    let mut add = |i: usize, j: usize, z: Complex<T>| {
        m[(i, j)] = m[(i, j)] + z;
        m[(j, i)] = m[(j, i)] + z.conj();
    };
    for j in 0..n {
        if periodic || j + 1 < n {
            add(j, (j + 1) % n, k1);
        }
        if periodic || j + 2 < n {
            add(j, (j + 2) % n, k2);
        }
    }
    check_hermitian(&m, NumericsSettings::<T>::default().hermitian_tol)?;
    Ok(StaticHamiltonian::from_matrix(&m, T::zero())?)
}

/// Open chain with `<j|H|j+1> = K1` and `<j|H|j+2> = K2`.
pub fn h_1d_open<T: Real>(n: usize, k1: Complex<T>, k2: Complex<T>) -> Result<StaticHamiltonian<T>, AnalysisError> {
    chain_1d(n, k1, k2, false)
}

/// Ring version of [`h_1d_open`]; for `n < 5` the wrapped terms add up.
pub fn h_1d_periodic<T: Real>(n: usize, k1: Complex<T>, k2: Complex<T>) -> Result<StaticHamiltonian<T>, AnalysisError> {
    chain_1d(n, k1, k2, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_hermitian;
    use crate::linalg::StateVector;
    use crate::propagate::distribution_at;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn phase_triangle(phi: f64) -> StaticHamiltonian<f64> {
        let j = Complex::from_polar(1.0, phi / 3.0);
        StaticHamiltonian::new(3)
            .unwrap()
            .with_coupling(0, 1, j)
            .unwrap()
            .with_coupling(1, 2, j)
            .unwrap()
            .with_coupling(2, 0, j)
            .unwrap()
    }

    #[test]
    fn transition_basics() {
        let two = StaticHamiltonian::new(2)
            .unwrap()
            .with_real_coupling(0, 1, 1.0)
            .unwrap();
        assert!((transition_probability(&two, 0, 1, PI / 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((transition_probability(&two, 0, 0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(transition_probability(&two, 0, 1, 0.0).unwrap() < 1e-14);
        assert!(transition_probability(&two, 0, 2, 1.0).is_err());
        let tri = phase_triangle(PI / 2.0);
        let a = transition_probability(&tri, 0, 1, 1.0).unwrap();
        let b = transition_probability(&tri, 1, 0, 1.0).unwrap();
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn trs_of_real_and_chiral() {
        let real = phase_triangle(0.0);
        assert!(trs_asymmetry(&real, &default_trs_grid(&real)).unwrap() < 1e-10);
        let pi_loop = phase_triangle(PI);
        assert!(trs_asymmetry(&pi_loop, &default_trs_grid(&pi_loop)).unwrap() < 1e-10);
        let chiral = h_1d_open(50, c(1.0, 0.0), c(0.0, 0.2)).unwrap();
        let grid: Vec<f64> = (1..=70).map(|k| k as f64 * 0.1).collect();
        assert!(trs_asymmetry(&chiral, &grid).unwrap() > 0.05);
    }

    #[test]
    fn gauge_identity_and_footnote() {
        let h = phase_triangle(0.9);
        assert_eq!(gauge_transform(&h, &GaugePhases::zeros(3)).unwrap(), h);
        let phi1 = 0.4;
        let n = 8;
        let h1 = h_1d_open(n, Complex::from_polar(1.0, phi1), Complex::from_polar(0.3, 2.0 * phi1)).unwrap();
        let phases = GaugePhases((0..n).map(|j| j as f64 * phi1).collect());
        let g = gauge_transform(&h1, &phases).unwrap();
        for (_, _, z) in g.edges() {
            assert!(z.im.abs() < 1e-15 && z.re > 0.0);
        }
        assert!(gauge_transform(&h1, &GaugePhases::zeros(3)).is_err());
    }

    #[test]
    fn reducibility() {
        let path = h_1d_open(6, c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        let (ok, w) = gauge_real_reducible(&path);
        assert!(ok);
        let g = gauge_transform(&path, &w.unwrap()).unwrap();
        assert!(g.edges().all(|(_, _, z)| z.im.abs() < 1e-12));
        assert!(!gauge_real_reducible(&phase_triangle(PI / 2.0)).0);
        assert!(gauge_real_reducible(&phase_triangle(PI)).0);
        let chiral = h_1d_open(6, c(1.0, 0.0), c(0.0, 0.2)).unwrap();
        assert!(!gauge_real_reducible(&chiral).0);
    }

    #[test]
    fn reflection_and_tv() {
        assert_eq!(reflection_asymmetry(&[0.25, 0.5, 0.25], 1).unwrap(), 0.0);
        assert_eq!(reflection_asymmetry(&[1.0, 0.0, 0.0], 1).unwrap(), 1.0);
        assert_eq!(reflection_asymmetry(&[0.5, 0.0, 0.0, 0.5], 0).unwrap(), 0.5);
        assert!(reflection_asymmetry(&[1.0], 1).is_err());
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(total_variation(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!(total_variation(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn fig6_reflection() {
        let psi = StateVector::basis(50, 24);
        let real = h_1d_open(50, c(1.0, 0.0), c(0.2, 0.0)).unwrap();
        let p = distribution_at(&real.matrix(), &psi, 7.0).unwrap();
        assert!(reflection_asymmetry(&p, 24).unwrap() > 0.0);
        let chiral = h_1d_open(50, c(1.0, 0.0), c(0.0, 0.2)).unwrap();
        let p = distribution_at(&chiral.matrix(), &psi, 7.0).unwrap();
        assert!(reflection_asymmetry(&p, 24).unwrap() > 0.3);
    }

    #[test]
    fn dispersion_matches_circulant() {
        assert_eq!(dispersion_1d(1.0, 0.2, 7, 0).unwrap(), 2.0);
        assert!(dispersion_1d(1.0f64, 0.2, 4, 1).unwrap().abs() < 1e-15);
        assert!(dispersion_1d(1.0, 0.2, 4, 4).is_err());
        for n in [3, 4, 5, 9, 16] {
            let h = h_1d_periodic(n, c(1.0, 0.0), c(0.0, 0.2)).unwrap();
            let got = eigenvalues_hermitian(&h.matrix()).unwrap();
            let mut want: Vec<f64> = (0..n).map(|k| dispersion_1d(1.0, 0.2, n, k).unwrap()).collect();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "n={n}: {got:?} vs {want:?}");
            }
        }
    }
}
