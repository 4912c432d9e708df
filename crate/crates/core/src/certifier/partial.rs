//! Stability of a concentrated majority cluster and its consequences.

use serde::Serialize;

use super::arc::{arrangement_constant, f_estimate_ii, f_lambda, phi1_estimate, phi_roots, theta_star};
use super::framework::validate_lambda_ell;
use super::quantities::{xi_inf_raw, xi_raw};
use super::report::{CertificateReport, Condition, Theorem};
use super::{invalid, CertifierError};
use crate::model::{diameter_of, one_minus_decay, PhaseState, SystemParams};
use crate::scalar::Scalar;

/// Hypotheses of the partial-locking certificate. `subset_b` must contain
/// `subset_a`; diameters of the initial frequencies are per subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialLockingInput<'a, T> {
    pub subset_a: &'a [usize],
    pub subset_b: &'a [usize],
    pub d_omega0_a: T,
    pub d_omega0_b: T,
    pub lambda: T,
    pub ell: T,
    pub eta: T,
    /// Time at which 𝒟(Θ_𝒜) ≤ ℓ is known to hold; at least ηm.
    pub t1: T,
}

/// Checkable consequences emitted when the certificate passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialPredictions<T> {
    /// 𝒟(Θ_𝒜(t)) ≤ ℓ for all t ≥ t1.
    pub persistence_from: T,
    pub ell: T,
    /// lim sup of 𝒟(Θ_𝒜) is at most φ₁(λ, 2ξ(∞) of 𝒜).
    pub tail_diameter_bound: T,
    /// The cruder 3πδ/(4(2λ−1)) estimate of the same bound.
    pub tail_diameter_estimate: T,
    /// c in (ν_i−ν_j)/κ ≤ lim (θ_i−θ_j) ≤ c(ν_i−ν_j)/κ.
    pub arrangement_constant: T,
    /// φ₂ − φ₁ for the 𝓑 quantities: separation of 𝓑 ∖ 𝒜_max from 𝒜_max.
    pub separation_bound: Option<T>,
}

fn sub_diameter<T: Scalar>(xs: &[T], idx: &[usize]) -> T {
    let picked: Vec<T> = idx.iter().map(|&i| xs[i]).collect();
    diameter_of(&picked)
}

fn validate<T: Scalar>(params: &SystemParams<T>, input: &PartialLockingInput<'_, T>) -> Result<(), CertifierError> {
    let n = params.n();
    if params.kappa() <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    validate_lambda_ell(input.lambda, input.ell)?;
    if !(input.eta > T::zero()) {
        return Err(invalid("eta", input.eta, "must be positive"));
    }
    if input.t1 < input.eta * params.m() {
        return Err(invalid("t1", input.t1, "must be at least eta * m"));
    }
    for (name, set) in [("subset_a", input.subset_a), ("subset_b", input.subset_b)] {
        if set.is_empty() {
            return Err(invalid(name, T::zero(), "must not be empty"));
        }
        if let Some(&i) = set.iter().find(|&&i| i >= n) {
            return Err(invalid(name, T::from_usize_lossy(i), "index out of range"));
        }
    }
    if let Some(&i) = input.subset_a.iter().find(|i| !input.subset_b.contains(i)) {
        return Err(invalid("subset_b", T::from_usize_lossy(i), "must contain subset_a"));
    }
    let needed = input.lambda * T::from_usize_lossy(n);
    if T::from_usize_lossy(input.subset_a.len()) < needed - T::lit(1e-9) {
        return Err(invalid(
            "subset_a",
            T::from_usize_lossy(input.subset_a.len()),
            format!("needs at least lambda * N = {needed} members"),
        ));
    }
    Ok(())
}

/// Evaluates the cluster-stability hypotheses for 𝒜 ⊂ 𝓑 and, when they all
/// hold, the predicted persistence, tail diameter, arrangement interval and
/// separation.
pub fn check_partial_locking<T: Scalar>(
    params: &SystemParams<T>,
    input: &PartialLockingInput<'_, T>,
) -> Result<CertificateReport<T>, CertifierError> {
    validate(params, input)?;
    let (m, kappa) = (params.m(), params.kappa());
    let (lambda, ell) = (input.lambda, input.ell);
    let d_v_a = sub_diameter(params.nu(), input.subset_a);
    let d_v_b = sub_diameter(params.nu(), input.subset_b);
    let half_f = f_lambda(lambda, ell) / T::lit(2.0);

    let xi_a = xi_raw(m, kappa, d_v_a, input.d_omega0_a, input.eta);
    let xi_inf_a = xi_inf_raw(m, kappa, d_v_a);
    let xi_inf_b = xi_inf_raw(m, kappa, d_v_b);
    let level_a = xi_inf_a + xi_inf_a;
    let level_b = xi_inf_b + xi_inf_b;

    let conditions = vec![
        Condition::strict("xi_partial_A", xi_a, half_f).with_detail("xi(A, eta) < f_lambda(ell)/2"),
        Condition::strict("xi_partial_B", xi_inf_b, half_f).with_detail("xi(B, infinity) < f_lambda(ell)/2"),
        Condition::strict("additional0", level_a, f_estimate_ii(lambda))
            .with_detail("2 m D(V_A) + 4 m kappa + D(V_A)/kappa below the linear-arrangement threshold"),
    ];
    let mut report = CertificateReport::new(Theorem::PartialLock, conditions);
    let q = &mut report.quantities;
    q.xi_eta = Some(xi_a);
    q.xi_inf = Some(xi_inf_a);
    q.f_ell = Some(f_lambda(lambda, ell));
    q.theta_star = Some(theta_star(lambda));

    if report.pass {
        // ξ(∞) ≤ ξ(η) < f_λ(ℓ)/2 ≤ max f_λ / 2, so both levels have roots
        match (phi_roots(lambda, level_a), phi_roots(lambda, level_b)) {
            (Ok((p1a, p2a)), Ok((p1b, p2b))) => {
                report.quantities.phi1 = Some(p1a);
                report.quantities.phi2 = Some(p2a);
                report.predictions = Some(PartialPredictions {
                    persistence_from: input.t1,
                    ell,
                    tail_diameter_bound: p1a,
                    tail_diameter_estimate: phi1_estimate(lambda, level_a),
                    arrangement_constant: arrangement_constant(p1a, lambda),
                    separation_bound: Some(p2b - p1b),
                });
            }
            (a, b) => {
                report.pass = false;
                report.notes.push(format!("root computation failed: {a:?} / {b:?}"));
            }
        }
    }
    Ok(report)
}

/// Partial locking certified directly from initial data: adds the gate
/// 𝒟(Θ⁰_𝒜) ≤ ℓ − m(1−e^{−η})𝒟(Ω⁰_𝒜) − (ηm − m + me^{−η})(𝒟(𝒱_𝒜) + 2κ)
/// and uses t1 = ηm. Phases of `state0` are taken as given, so members of 𝒜
/// should already be shifted by their 2π translations.
pub fn check_corollary<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    subset_a: &[usize],
    subset_b: &[usize],
    lambda: T,
    ell: T,
    eta: T,
) -> Result<CertificateReport<T>, CertifierError> {
    state0.check_matches(params)?;
    let m = params.m();
    let input = PartialLockingInput {
        subset_a,
        subset_b,
        d_omega0_a: sub_diameter(&state0.omega, subset_a),
        d_omega0_b: sub_diameter(&state0.omega, subset_b),
        lambda,
        ell,
        eta,
        t1: eta * m,
    };
    let mut report = check_partial_locking(params, &input)?;
    let d_v_a = sub_diameter(params.nu(), subset_a);
    let travel = m * one_minus_decay(eta, T::one()) * input.d_omega0_a
        + m * (eta + (-eta).exp_m1()) * (d_v_a + params.kappa() + params.kappa());
    let gate = Condition::non_strict("corollary_gate", sub_diameter(&state0.theta, subset_a), ell - travel)
        .with_detail("initial cluster diameter leaves room for the initial-layer drift");
    report.which_theorem = Theorem::Corollary;
    report.per_condition.push(gate);
    report.refresh();
    if !report.pass {
        report.predictions = None;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input<'a>(a: &'a [usize], b: &'a [usize]) -> PartialLockingInput<'a, f64> {
        PartialLockingInput {
            subset_a: a,
            subset_b: b,
            d_omega0_a: 0.0,
            d_omega0_b: 0.0,
            lambda: 0.8,
            ell: 1.0,
            eta: 5.0,
            t1: 1.0,
        }
    }

    #[test]
    fn identical_frequencies_tiny_inertia_pass() {
        let p = SystemParams::new(1e-6, 1.0, vec![0.3; 5]).unwrap();
        let all = [0, 1, 2, 3, 4];
        let rep = check_partial_locking(&p, &input(&all, &all)).unwrap();
        assert!(rep.pass, "{rep:#?}");
        let pred = rep.predictions.unwrap();
        assert!(pred.tail_diameter_bound < 1e-4);
        assert!(pred.arrangement_constant > 1.0);
    }

    #[test]
    fn range_violations() {
        let p = SystemParams::new(0.01, 1.0, vec![0.0; 5]).unwrap();
        let all = [0, 1, 2, 3, 4];
        let small = [0, 1];
        assert!(check_partial_locking(&p, &input(&small, &all)).is_err());
        assert!(check_partial_locking(&p, &input(&all, &small)).is_err());
        let mut bad = input(&all, &all);
        bad.t1 = 0.01;
        assert!(check_partial_locking(&p, &bad).is_err());
        let mut bad = input(&all, &all);
        bad.lambda = 0.4;
        assert!(check_partial_locking(&p, &bad).is_err());
    }
}
