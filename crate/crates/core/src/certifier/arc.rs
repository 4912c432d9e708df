//! The arc-stability function f_λ(θ) = λ sin θ − 2(1 − λ) sin(θ/2) and its
//! level-set roots.

use super::{invalid, CertifierError};
use crate::scalar::Scalar;

fn check_lambda<T: Scalar>(lambda: T) -> Result<(), CertifierError> {
    if lambda > T::lit(0.5) && lambda <= T::one() {
        Ok(())
    } else {
        Err(invalid("lambda", lambda, "must lie in (1/2, 1]"))
    }
}

pub fn f_lambda<T: Scalar>(lambda: T, theta: T) -> T {
    lambda * theta.sin() - T::lit(2.0) * (T::one() - lambda) * (theta / T::lit(2.0)).sin()
}

/// Positive zero 2cos⁻¹((1 − λ)/λ).
pub fn f_zero<T: Scalar>(lambda: T) -> T {
    T::lit(2.0) * ((T::one() - lambda) / lambda).acos()
}

/// Maximizer θ* = 2cos⁻¹((1 − λ + √((1 − λ)² + 8λ²))/(4λ)).
pub fn theta_star<T: Scalar>(lambda: T) -> T {
    let a = T::one() - lambda;
    let root = (a * a + T::lit(8.0) * lambda * lambda).sqrt();
    T::lit(2.0) * ((a + root) / (T::lit(4.0) * lambda)).acos()
}

pub fn f_max<T: Scalar>(lambda: T) -> T {
    f_lambda(lambda, theta_star(lambda))
}

/// max f_λ through the radical
/// (−3(1−λ) + √(9λ²−2λ+1))·√(3λ²+2λ−1−(1−λ)√(9λ²−2λ+1)) / (4√2 λ).
pub fn f_max_radical<T: Scalar>(lambda: T) -> T {
    let a = T::one() - lambda;
    let s = (T::lit(9.0) * lambda * lambda - T::lit(2.0) * lambda + T::one()).sqrt();
    let inner = T::lit(3.0) * lambda * lambda + T::lit(2.0) * lambda - T::one() - a * s;
    (s - T::lit(3.0) * a) * inner.max(T::zero()).sqrt() / (T::lit(4.0) * T::SQRT_2() * lambda)
}

/// ((2λ−1)^{3/2}/√(2λ))·(2 − λ)/(√(λ/2) + (1 − λ)), the value of f_λ at
/// cos⁻¹((1 − λ)/λ).
pub fn f_estimate_ii<T: Scalar>(lambda: T) -> T {
    let two = T::lit(2.0);
    let g = two * lambda - T::one();
    g.max(T::zero()).powf(T::lit(1.5)) / (two * lambda).sqrt() * (two - lambda)
        / ((lambda / two).sqrt() + (T::one() - lambda))
}

/// Upper estimate 3πδ/(4(2λ − 1)) of the smaller root.
pub fn phi1_estimate<T: Scalar>(lambda: T, delta: T) -> T {
    T::lit(3.0) * T::PI() * delta / (T::lit(4.0) * (T::lit(2.0) * lambda - T::one()))
}

fn bisect<T: Scalar>(lambda: T, target: T, mut lo: T, mut hi: T, rising: bool) -> T {
    let half = T::lit(0.5);
    for _ in 0..300 {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let below = f_lambda(lambda, mid) < target;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f_lambda(lambda, lo), f_lambda(lambda, hi));
    if (flo - target).abs() <= (fhi - target).abs() {
        lo
    } else {
        hi
    }
}

/// Roots φ₁ < θ* < φ₂ of f_λ(θ) = δ on (0, 2cos⁻¹((1 − λ)/λ)).
pub fn phi_roots<T: Scalar>(lambda: T, delta: T) -> Result<(T, T), CertifierError> {
    check_lambda(lambda)?;
    if !(delta > T::zero()) {
        return Err(invalid("delta", delta, "level must be positive"));
    }
    let ts = theta_star(lambda);
    let peak = f_lambda(lambda, ts).min(f_max_radical(lambda));
    if delta >= peak {
        return Err(CertifierError::NoRoots {
            delta: delta.to_f64().unwrap_or(f64::NAN),
            f_max: peak.to_f64().unwrap_or(f64::NAN),
        });
    }
    let phi1 = bisect(lambda, delta, T::zero(), ts, true);
    let phi2 = bisect(lambda, delta, ts, f_zero(lambda), false);
    Ok((phi1, phi2))
}

/// φ₁/(2 sin(φ₁/2)(λ cos φ₁ − (1 − λ))); infinite when the denominator is not
/// positive.
pub fn arrangement_constant<T: Scalar>(phi1: T, lambda: T) -> T {
    let denom = T::lit(2.0) * (phi1 / T::lit(2.0)).sin() * (lambda * phi1.cos() - (T::one() - lambda));
    if phi1 == T::zero() {
        let g = T::lit(2.0) * lambda - T::one();
        return if g > T::zero() { T::one() / g } else { T::infinity() };
    }
    if denom > T::zero() {
        phi1 / denom
    } else {
        T::infinity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn one_cluster_degenerate_case() {
        assert!((theta_star(1.0) - FRAC_PI_2).abs() < 1e-15);
        assert!((f_max(1.0_f64) - 1.0).abs() < 1e-15);
        assert!((f_max_radical(1.0_f64) - 1.0).abs() < 1e-15);
        assert!((f_zero(1.0) - PI).abs() < 1e-15);
        assert!((f_lambda(1.0, 0.7) - 0.7_f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn zeros() {
        for lambda in [0.55_f64, 0.7, 0.9] {
            assert_eq!(f_lambda(lambda, 0.0), 0.0);
            assert!(f_lambda(lambda, f_zero(lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_thirds_at_theta_star() {
        let lambda = 2.0 / 3.0;
        let ell = 2.0 * ((1.0 + 33f64.sqrt()) / 8.0).acos();
        let expected = 0.25 * ((69.0 - 11.0 * 33f64.sqrt()) / 6.0).sqrt();
        assert!((f_lambda(lambda, ell) - expected).abs() < 1e-15);
        assert!((theta_star(lambda) - ell).abs() < 1e-12);
    }

    #[test]
    fn roots_errors() {
        assert!(matches!(phi_roots(0.8, 2.0), Err(CertifierError::NoRoots { .. })));
        assert!(phi_roots(0.5, 0.1).is_err());
        assert!(phi_roots(0.8, 0.0).is_err());
    }

    #[test]
    fn arrangement_constant_limit() {
        assert!((arrangement_constant(0.0_f64, 0.75) - 2.0).abs() < 1e-15);
        assert!((arrangement_constant(1e-6_f64, 0.75) - 2.0).abs() < 1e-5);
        assert!(arrangement_constant(1.4_f64, 0.6).is_infinite());
    }
}
