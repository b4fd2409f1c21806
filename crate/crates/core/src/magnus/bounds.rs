use crate::magnus::MagnusError;
use crate::scalar::Real;

/// Period keeping the accumulated truncation error below `eps` after `t_evol`,
/// with the constant factor of the error estimate set to 1:
/// order 0 gives `eps / (t_evol h_max^2)`, order 1 gives `sqrt(eps / t_evol) / h_max^{3/2}`.
pub fn period_bound<T: Real>(eps: T, t_evol: T, h_max: T, order: u8) -> Result<T, MagnusError> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(MagnusError::InvalidArgument("eps must lie in (0, 1)".into()));
    }
    if !(t_evol > T::zero()) || !(h_max > T::zero()) || !t_evol.is_finite() || !h_max.is_finite() {
        return Err(MagnusError::InvalidArgument("t_evol and h_max must be positive".into()));
    }
    match order {
        0 => Ok(eps / (t_evol * h_max * h_max)),
        1 => Ok((eps / t_evol).sqrt() / (h_max * h_max.sqrt())),
        _ => Err(MagnusError::InvalidArgument(format!(
            "period bound order {order} not supported"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formulas() {
        assert!((period_bound(0.1f64, 10.0, 2.0, 0).unwrap() - 2.5e-3).abs() < 1e-18);
        assert!((period_bound(0.01f64, 1.0, 1.0, 1).unwrap() - 0.1).abs() < 1e-16);
    }

    #[test]
    fn order_one_is_looser_when_eps_small() {
        for &(eps, te, hm) in &[(0.1, 4.0, 3.0), (0.01, 10.0, 0.5), (0.5, 2.0, 1.0)] {
            let b0 = period_bound(eps, te, hm, 0).unwrap();
            let b1 = period_bound(eps, te, hm, 1).unwrap();
            assert_eq!(b1 > b0, eps < te * hm);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(period_bound(1.0, 1.0, 1.0, 0).is_err());
        assert!(period_bound(0.1, 0.0, 1.0, 0).is_err());
        assert!(period_bound(0.1, 1.0, -1.0, 1).is_err());
        assert!(period_bound(0.1, 1.0, 1.0, 2).is_err());
    }
}
