use super::arc::{f_estimate_ii, f_lambda, f_zero, phi_roots, theta_star};
use super::quantities::{xi_inf_raw, xi_raw, zeta_raw};
use super::report::{CertificateReport, Condition, FreeParams, Theorem};
use super::{invalid, CertifierError};
use crate::model::SystemParams;
use crate::scalar::Scalar;

pub(crate) fn validate_free<T: Scalar>(free: &FreeParams<T>) -> Result<(), CertifierError> {
    if !(free.eta > T::zero()) {
        return Err(invalid("eta", free.eta, "must be positive"));
    }
    if !(free.delta > T::zero() && free.delta < T::one()) {
        return Err(invalid("delta", free.delta, "must lie in (0, 1)"));
    }
    validate_lambda_ell(free.lambda, free.ell)
}

pub(crate) fn validate_lambda_ell<T: Scalar>(lambda: T, ell: T) -> Result<(), CertifierError> {
    if !(lambda > T::lit(0.5) && lambda <= T::one()) {
        return Err(invalid("lambda", lambda, "must lie in (1/2, 1]"));
    }
    // 2cos⁻¹(1/λ − 1) is the positive zero of f_λ
    let upper = f_zero(lambda);
    if !(ell > T::zero() && ell < upper) {
        return Err(invalid("ell", ell, format!("must lie in (0, {upper})")));
    }
    Ok(())
}

/// Evaluates the four framework conditions for the given free parameters.
pub fn check_framework<T: Scalar>(
    params: &SystemParams<T>,
    r0: T,
    d_omega0: T,
    free: &FreeParams<T>,
) -> Result<CertificateReport<T>, CertifierError> {
    validate_free(free)?;
    let (m, kappa, d_v) = (params.m(), params.kappa(), params.nu_diameter());
    if kappa <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    let FreeParams { eta, delta, lambda, ell } = *free;
    let one = T::one();
    let zeta = zeta_raw(m, kappa, d_v, d_omega0, eta);
    let xi = xi_raw(m, kappa, d_v, d_omega0, eta);
    let dr = delta * r0;
    let (sh, ch) = (ell / T::lit(2.0)).sin_cos();

    let f1a = Condition::strict("F1.R0", T::zero(), r0).with_detail("R0 > 0");
    let f1 = Condition::non_strict("F1", zeta, (one - delta) * r0).with_detail("zeta(eta) <= (1 - delta) R0");

    let f2a = Condition::non_strict("F2", lambda + (one - lambda) * ch, dr)
        .with_detail("delta R0 >= lambda + (1 - lambda) cos(ell/2)");
    let ratio = if dr > T::zero() { xi / dr } else { T::infinity() };
    let f2b = Condition::non_strict("F2", T::lit(2.0) * lambda + ratio * ratio / (one - ch), one + dr)
        .with_detail("2 lambda + (xi/(delta R0))^2 / (1 - cos(ell/2)) <= 1 + delta R0");
    let f2 = if f2a.pass || (!f2b.pass && f2a.margin >= f2b.margin) { f2a } else { f2b };

    let f3 = Condition::strict("F3", xi, sh * (lambda * ch - (one - lambda)))
        .with_detail("xi(eta) < sin(ell/2)(lambda cos(ell/2) - (1 - lambda))");
    let f4 = Condition::strict(
        "F4",
        d_v / kappa + T::lit(4.0) * m * kappa + T::lit(2.0) * m * d_v,
        f_estimate_ii(lambda),
    )
    .with_detail("D(V)/kappa + 4 m kappa + 2 m D(V) below the linear-arrangement threshold");

    let mut report = CertificateReport::new(Theorem::FrameworkF, vec![f1a, f1, f2, f3, f4]);
    report.free_params = Some(*free);
    let q = &mut report.quantities;
    q.zeta_eta = Some(zeta);
    q.xi_eta = Some(xi);
    q.xi_inf = Some(xi_inf_raw(m, kappa, d_v));
    q.f_ell = Some(f_lambda(lambda, ell));
    q.theta_star = Some(theta_star(lambda));
    if let Ok((p1, p2)) = phi_roots(lambda, xi + xi) {
        q.phi1 = Some(p1);
        q.phi2 = Some(p2);
    }
    Ok(report)
}

/// Candidate values for [`framework_grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchRanges<T> {
    pub etas: Vec<T>,
    pub deltas: Vec<T>,
    pub lambdas: Vec<T>,
    /// Number of ℓ values tried per λ, evenly spaced inside the admissible range.
    pub ells_per_lambda: usize,
}

impl<T: Scalar> Default for GridSearchRanges<T> {
    fn default() -> Self {
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<T> {
            (0..n)
                .map(|k| T::lit(lo + (hi - lo) * (k as f64 + 0.5) / n as f64))
                .collect()
        };
        Self {
            etas: (0..16).map(|k| T::lit(10f64.powf(-2.0 + 3.5 * k as f64 / 15.0))).collect(),
            deltas: lin(0.0, 1.0, 20),
            lambdas: lin(0.5, 1.0, 20),
            ells_per_lambda: 20,
        }
    }
}

/// Brute-force search for free parameters satisfying the framework. Returns
/// the first passing report in grid order. Not finding one proves nothing.
pub fn framework_grid_search<T: Scalar>(
    params: &SystemParams<T>,
    r0: T,
    d_omega0: T,
    ranges: &GridSearchRanges<T>,
) -> Result<Option<CertificateReport<T>>, CertifierError> {
    if params.kappa() <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    let steps = ranges.ells_per_lambda.max(1);
    for &lambda in &ranges.lambdas {
        let upper = f_zero(lambda);
        for k in 0..steps {
            let ell = upper * T::from_usize_lossy(k + 1) / T::from_usize_lossy(steps + 1);
            for &eta in &ranges.etas {
                for &delta in &ranges.deltas {
                    let free = FreeParams { eta, delta, lambda, ell };
                    if validate_free(&free).is_err() {
                        continue;
                    }
                    let report = check_framework(params, r0, d_omega0, &free)?;
                    if report.pass {
                        return Ok(Some(report));
                    }
                }
            }
        }
    }
    Ok(None)
}
