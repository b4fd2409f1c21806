use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{ComplexMatrix, HermitianEigen, LinalgError};
use crate::scalar::{cis, lit, to_f64, Real};
use crate::settings::NumericsSettings;

/// Checks hermiticity relative to the matrix scale.
pub fn check_hermitian<T: Real>(h: &ComplexMatrix<T>, tol: T) -> Result<(), LinalgError> {
    let residual = h.hermiticity_residual();
    if residual <= tol * h.max_abs().max(T::one()) {
        Ok(())
    } else {
        Err(LinalgError::NonHermitianInput {
            residual: to_f64(residual),
        })
    }
}

/// `||U^dagger U - I||_op`.
pub fn unitarity_residual<T: Real>(u: &ComplexMatrix<T>) -> T {
    operator_norm(&u.unitarity_defect())
}

/// `e^{-iHt}` through the eigendecomposition of `H`.
pub fn expm_hermitian<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>, LinalgError> {
    expm_hermitian_with(h, t, &NumericsSettings::default())
}

pub fn expm_hermitian_with<T: Real>(
    h: &ComplexMatrix<T>,
    t: T,
    settings: &NumericsSettings<T>,
) -> Result<ComplexMatrix<T>, LinalgError> {
    check_hermitian(h, settings.hermitian_tol)?;
    if h.max_abs() == T::zero() {
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    Ok(HermitianEigen::new(h)?.apply(|x| cis(-x * t)))
}

/// Principal `H` with `e^{-iH} = U`, i.e. `i log U`.
pub fn logm_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
    logm_unitary_with(u, &NumericsSettings::default())
}

pub fn logm_unitary_with<T: Real>(
    u: &ComplexMatrix<T>,
    settings: &NumericsSettings<T>,
) -> Result<ComplexMatrix<T>, LinalgError> {
    let n = u.dim();
    let defect = unitarity_residual(u);
    if !(defect <= settings.unitary_tol) {
        return Err(LinalgError::NonUnitaryInput { defect: to_f64(defect) });
    }
    let half = lit::<T>(0.5);
    let ua = u.adjoint();
    // U = V e^{-i theta} V^dagger gives S = -V sin(theta) V^dagger and C = V cos(theta) V^dagger.
    let s = (u - &ua).scale(Complex::new(T::zero(), half));
    let cmat = (u + &ua).scale_real(half);
    let eig = HermitianEigen::new(&s)?;

    // Eigenphases theta and pi - theta share a sine; resolve each cluster with C.
    let cluster_tol = lit::<T>(1e-6);
    let mut vectors: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= cluster_tol {
            end += 1;
        }
        let block: Vec<Vec<Complex<T>>> = (start..end).map(|k| eig.vector(k)).collect();
        if block.len() == 1 {
            vectors.extend(block);
        } else {
            let m = block.len();
            let cw: Vec<Vec<Complex<T>>> = block.iter().map(|v| cmat.mul_vec(v)).collect();
            let sub = ComplexMatrix::from_fn(m, |a, b| dot(&block[a], &cw[b]));
            let sub_eig = HermitianEigen::new(&sub)?;
            for k in 0..m {
                let mut v = vec![Complex::zero(); n];
                for (a, w) in block.iter().enumerate() {
                    let coef = sub_eig.vectors[(a, k)];
                    for (vi, wi) in v.iter_mut().zip(w) {
                        *vi = *vi + *wi * coef;
                    }
                }
                vectors.push(v);
            }
        }
        start = end;
    }

    let limit = T::PI() - settings.branch_margin;
    let mut out = ComplexMatrix::zeros(n);
    for v in &vectors {
        let theta = -dot(v, &u.mul_vec(v)).arg();
        if theta.abs() > limit {
            return Err(LinalgError::BranchCut { phase: to_f64(theta) });
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + v[i] * v[j].conj() * theta;
            }
        }
    }
    Ok(out.hermitian_part())
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    if m.max_abs() == T::zero() {
        return T::zero();
    }
    let hermitian = m.hermiticity_residual() == T::zero();
    let target = if hermitian { m.clone() } else { m.adjoint().matmul(m) };
    match HermitianEigen::new(&target) {
        Ok(eig) => {
            let top = eig.values.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
            if hermitian {
                top
            } else {
                top.sqrt()
            }
        }
        // QL failed to converge; Frobenius norm is an upper bound.
        Err(_) => m.frobenius_norm(),
    }
}

/// `sum_i conj(a_i) b_i`.
pub(crate) fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>, LinalgError> {
    check_hermitian(h, NumericsSettings::<T>::default().hermitian_tol)?;
    Ok(HermitianEigen::new(h)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use std::f64::consts::PI;

    /// Fixed-step classical RK4 for `dU/dt = -iHU`; independent of the
    /// eigendecomposition path.
    fn rk4_propagator<T: Real>(h: &ComplexMatrix<T>, t: T, steps: usize) -> ComplexMatrix<T> {
        let n = h.dim();
        let dt = t / T::from_usize(steps.max(1)).unwrap_or_else(T::one);
        let mi = h.scale(Complex::new(T::zero(), -T::one()));
        let f = |u: &ComplexMatrix<T>| mi.matmul(u);
        let mut u = ComplexMatrix::identity(n);
        let half = lit::<T>(0.5);
        let sixth = lit::<T>(1.0 / 6.0);
        for _ in 0..steps.max(1) {
            let k1 = f(&u);
            let k2 = f(&(&u + &k1.scale_real(dt * half)));
            let k3 = f(&(&u + &k2.scale_real(dt * half)));
            let k4 = f(&(&u + &k3.scale_real(dt)));
            let incr = &(&k1 + &k2.scale_real(lit(2.0))) + &(&k3.scale_real(lit(2.0)) + &k4);
            u = &u + &incr.scale_real(dt * sixth);
        }
        u
    }

    fn pair(j: f64) -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_rows(&[&[0.0, j], &[j, 0.0]]).unwrap()
    }

    #[test]
    fn expm_trivial_cases() {
        let z = ComplexMatrix::<f64>::zeros(3);
        assert_eq!(expm_hermitian(&z, 5.0).unwrap(), ComplexMatrix::identity(3));
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let u = expm_hermitian(&d, PI).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn expm_full_transfer_against_rk4() {
        let h = pair(1.0);
        let u = expm_hermitian(&h, PI / 2.0).unwrap();
        assert!((u[(0, 1)].norm() - 1.0).abs() < 1e-14);
        let oracle = rk4_propagator(&h, PI / 2.0, 400);
        assert!(u.max_abs_diff(&oracle) < 1e-9);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.5, 0.0]]).unwrap();
        assert!(matches!(
            expm_hermitian(&m, 1.0),
            Err(LinalgError::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn logm_identity_and_round_trip() {
        assert!(logm_unitary(&ComplexMatrix::<f64>::identity(4)).unwrap().max_abs() < 1e-15);
        let h = ComplexMatrix::from_rows(vec![
            vec![c(0.2, 0.0), c(0.1, 0.15), c(0.0, -0.05)],
            vec![c(0.1, -0.15), c(-0.1, 0.0), c(0.12, 0.0)],
            vec![c(0.0, 0.05), c(0.12, 0.0), c(0.05, 0.0)],
        ])
        .unwrap();
        let scale = 0.5 / operator_norm(&h);
        let h = h.scale_real(scale);
        let back = logm_unitary(&expm_hermitian(&h, 1.0).unwrap()).unwrap();
        assert!(back.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn logm_resolves_supplementary_phases() {
        // Eigenphases 0.4 and pi - 0.4 have the same sine.
        let h = ComplexMatrix::from_real_diagonal(&[0.4, PI - 0.4, -1.0]);
        let mix = expm_hermitian(
            &ComplexMatrix::from_fn(3, |i, j| {
                if i != j {
                    c(0.3, 0.1 * (i as f64 - j as f64))
                } else {
                    c(0.0, 0.0)
                }
            }),
            1.0,
        )
        .unwrap();
        let hh = mix.matmul(&h).matmul(&mix.adjoint());
        let u = expm_hermitian(&hh, 1.0).unwrap();
        let back = logm_unitary(&u).unwrap();
        assert!(back.max_abs_diff(&hh) < 1e-10);
    }

    #[test]
    fn logm_branch_cut_and_non_unitary() {
        let u = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]);
        assert!(matches!(logm_unitary(&u), Err(LinalgError::BranchCut { .. })));
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 1.0]);
        assert!(matches!(logm_unitary(&m), Err(LinalgError::NonUnitaryInput { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::from_real_diagonal(&[3.0, -5.0])), 5.0);
        assert_eq!(operator_norm(&ComplexMatrix::<f64>::zeros(2)), 0.0);
        let k3 = ComplexMatrix::<f64>::from_fn(3, |i, j| if i == j { c(0.0, 0.0) } else { c(1.0, 0.0) });
        assert!((operator_norm(&k3) - 2.0).abs() < 1e-14);
        // Non-normal: [[0, 2], [0, 0]] has singular values {2, 0}.
        let nil = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm(&nil) - 2.0).abs() < 1e-14);
    }
}
