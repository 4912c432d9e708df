use serde::Serialize;

use super::quantities::xi_inf_raw;
use super::report::{CertificateReport, Condition, Theorem};
use super::{invalid, CertifierError};
use crate::model::SystemParams;
use crate::scalar::Scalar;

/// (1/8)√((69 − 11√33)/6): half of f_{2/3} at its maximizer.
pub fn n3_threshold<T: Scalar>() -> T {
    let s33 = T::lit(33.0).sqrt();
    ((T::lit(69.0) - T::lit(11.0) * s33) / T::lit(6.0)).sqrt() / T::lit(8.0)
}

/// Three oscillators lock from every initial state when
/// m𝒟(𝒱) + 2mκ + 𝒟(𝒱)/(2κ) is below [`n3_threshold`].
pub fn check_n3<T: Scalar>(params: &SystemParams<T>) -> Result<CertificateReport<T>, CertifierError> {
    if params.n() != 3 {
        return Err(CertifierError::WrongSize { expected: 3, got: params.n() });
    }
    if params.kappa() <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    let lhs = xi_inf_raw(params.m(), params.kappa(), params.nu_diameter());
    let cond = Condition::strict("N3", lhs, n3_threshold())
        .with_detail("m D(V) + 2 m kappa + D(V)/(2 kappa) < (1/8) sqrt((69 - 11 sqrt 33)/6)");
    let mut report = CertificateReport::new(Theorem::N3, vec![cond]);
    report.quantities.xi_inf = Some(lhs);
    Ok(report)
}

/// First-order model: κ(R⁰)² > 1.6 𝒟(𝒱) guarantees locking. A non-positive
/// R⁰ yields a failing report rather than an error.
pub fn check_first_order<T: Scalar>(params: &SystemParams<T>, r0: T) -> CertificateReport<T> {
    let r0_cond = Condition::strict("R0", T::zero(), r0).with_detail("R0 > 0");
    let threshold = Condition::strict("first_order", T::lit(1.6) * params.nu_diameter(), params.kappa() * r0 * r0)
        .with_detail("1.6 D(V) < kappa R0^2");
    CertificateReport::new(Theorem::FirstOrder, vec![r0_cond, threshold])
}

/// A positive time, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Horizon<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Horizon::Infinite)
    }

    pub fn value(&self) -> T {
        match *self {
            Horizon::Finite(t) => t,
            Horizon::Infinite => T::infinity(),
        }
    }
}

/// Positivity horizon T*(a, b, c) of solutions of a y'' + b y' + c y ≥ 0:
/// infinite when 4ac ≤ b², otherwise
/// πa/√(4ac − b²) + (2a/√(4ac − b²)) sin⁻¹(b/(2√(ac))).
pub fn sturm_picone_tstar<T: Scalar>(a: T, b: T, c: T) -> Result<Horizon<T>, CertifierError> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(invalid(name, v, "must be positive and finite"));
        }
    }
    let disc = T::lit(4.0) * a * c - b * b;
    if disc <= T::zero() {
        return Ok(Horizon::Infinite);
    }
    let root = disc.sqrt();
    let arg = (b / (T::lit(2.0) * (a * c).sqrt())).min(T::one());
    Ok(Horizon::Finite(T::PI() * a / root + T::lit(2.0) * a / root * arg.asin()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn three(m: f64, kappa: f64, d_v: f64) -> SystemParams<f64> {
        SystemParams::new(m, kappa, vec![0.0, d_v / 2.0, d_v]).unwrap()
    }

    #[test]
    fn n3_examples() {
        assert!((n3_threshold::<f64>() - 0.123003).abs() < 5e-7);
        assert!(check_n3(&three(0.01, 1.0, 0.0)).unwrap().pass);
        // mκ = 0.1, 𝒟/κ = 0.05, m𝒟 = 0.005
        let rep = check_n3(&three(0.1, 1.0, 0.05)).unwrap();
        assert!(!rep.pass);
        assert!((rep.per_condition[0].value - 0.23).abs() < 1e-15);
        let p4 = SystemParams::new(0.1, 1.0, vec![0.0; 4]).unwrap();
        assert_eq!(check_n3(&p4), Err(CertifierError::WrongSize { expected: 3, got: 4 }));
    }

    #[test]
    fn first_order_examples() {
        let p = |kappa| SystemParams::first_order(kappa, vec![0.0, 1.0]).unwrap();
        assert!(check_first_order(&p(6.5), 0.5).pass);
        assert!(!check_first_order(&p(6.0), 0.5).pass);
        assert!(!check_first_order(&p(6.5), 0.0).pass);
        let same = SystemParams::first_order(0.01, vec![0.2; 4]).unwrap();
        assert!(check_first_order(&same, 0.1).pass);
    }

    #[test]
    fn tstar_values() {
        let t = sturm_picone_tstar(1.0, 1.0, 1.0).unwrap().value();
        assert!((t - 4.0 * PI / (3.0 * 3f64.sqrt())).abs() < 1e-14);
        assert!(sturm_picone_tstar(0.1, 1.0, 2.0).unwrap().is_infinite());
        assert!(sturm_picone_tstar(0.0, 1.0, 1.0).is_err());
        assert!(sturm_picone_tstar(1.0, -1.0, 1.0).is_err());
    }
}
