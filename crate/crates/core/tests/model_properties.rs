use approx::assert_abs_diff_eq;
use kuramoto_lock_core::certifier::InstanceSummary;
use kuramoto_lock_core::diagnostics::order_state;
use kuramoto_lock_core::model::{
    dilate_transform, galilean_transform, mean_closed_form, permute, reflect, rhs_first_order,
    rhs_first_order_with, rhs_inertial, rhs_inertial_with, CouplingEval, GalileanShift, ModelError,
    PhaseState, SystemParams,
};
use proptest::prelude::*;

/// Double loop straight from the definition.
fn naive_rhs(m: f64, kappa: f64, nu: &[f64], theta: &[f64], omega: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = nu.len();
    let mut acc = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += (theta[j] - theta[i]).sin();
        }
        acc[i] = (nu[i] - omega[i] + kappa / n as f64 * s) / m;
    }
    (omega.to_vec(), acc)
}

fn instance(max_n: usize) -> impl Strategy<Value = (SystemParams<f64>, PhaseState<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            0.01f64..5.0,
            0.0f64..5.0,
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(|(m, kappa, nu, theta, omega)| {
                (
                    SystemParams::new(m, kappa, nu).unwrap(),
                    PhaseState::new(0.0, theta, omega).unwrap(),
                )
            })
    })
}

#[test]
fn rhs_small_examples() {
    let p = SystemParams::new(0.7, 3.0, vec![0.0, 0.0]).unwrap();
    let s = PhaseState::new(0.0, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    assert_eq!(rhs_inertial(&p, &s).unwrap().1, vec![0.0, 0.0]);

    let p = SystemParams::new(1.0, 2.0, vec![0.0, 0.0]).unwrap();
    let s = PhaseState::new(0.0, vec![0.0, std::f64::consts::FRAC_PI_2], vec![0.0, 0.0]).unwrap();
    let (_, dw) = rhs_inertial(&p, &s).unwrap();
    assert_abs_diff_eq!(dw[0], 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(dw[1], -1.0, epsilon = 1e-15);

    let single = SystemParams::first_order(4.0, vec![1.25]).unwrap();
    assert_eq!(rhs_first_order(&single, &[3.0]), vec![1.25]);
    let same = SystemParams::first_order(4.0, vec![0.0; 3]).unwrap();
    assert_eq!(rhs_first_order(&same, &[0.4; 3]), vec![0.0; 3]);
}

#[test]
fn zero_inertia_is_a_separate_path() {
    let p = SystemParams::first_order(1.0, vec![0.1, 0.2]).unwrap();
    let s = PhaseState::at_rest(vec![0.0, 1.0]).unwrap();
    assert_eq!(rhs_inertial(&p, &s), Err(ModelError::ZeroInertia));
    assert!(rhs_first_order(&p, &s.theta).iter().all(|v: &f64| v.is_finite()));
}

#[test]
fn three_oscillator_oracle() {
    let p = SystemParams::new(0.37, 1.9, vec![0.3, -1.1, 0.45]).unwrap();
    let s = PhaseState::new(0.0, vec![0.2, 2.9, -4.4], vec![1.0, -0.5, 0.25]).unwrap();
    let (dt, dw) = rhs_inertial(&p, &s).unwrap();
    let (et, ew) = naive_rhs(0.37, 1.9, p.nu(), &s.theta, &s.omega);
    for i in 0..3 {
        assert_abs_diff_eq!(dt[i], et[i], epsilon = 1e-14);
        assert_abs_diff_eq!(dw[i], ew[i], epsilon = 1e-14);
    }
}

#[test]
fn mean_trajectory_limits() {
    let p = SystemParams::new(0.5, 1.0, vec![-1.0, 1.0]).unwrap();
    let s = PhaseState::new(0.0, vec![0.3, 0.9], vec![1.0, -1.0]).unwrap();
    let mean = mean_closed_form(&p, &s).unwrap();
    for t in [0.0, 1.0, 100.0] {
        assert_abs_diff_eq!(mean.at(t).0, 0.6, epsilon = 1e-15);
    }
    let p = p.with_nu(vec![1.0, 2.0]).unwrap();
    let mean = mean_closed_form(&p, &s).unwrap();
    assert_eq!(mean.at(0.0), (0.6, 0.0));
    assert_abs_diff_eq!(mean.at(200.0).1, 1.5, epsilon = 1e-15);
}

#[test]
fn transform_identities() {
    let p = SystemParams::new(0.2, 1.3, vec![0.1, -0.4, 0.7]).unwrap();
    let s = PhaseState::new(2.5, vec![0.0, 1.0, 2.0], vec![0.5, 0.0, -0.5]).unwrap();
    assert_eq!(galilean_transform(&p, &s, GalileanShift::default()).unwrap(), (p.clone(), s.clone()));
    assert_eq!(dilate_transform(&p, &s, 1.0).unwrap(), (p.clone(), s.clone()));

    let s0 = PhaseState { t: 0.0, ..s.clone() };
    let shift = GalileanShift { nu: 0.3, theta: 1.1, omega: -0.2 };
    let (_, g) = galilean_transform(&p, &s0, shift).unwrap();
    for i in 0..3 {
        assert_eq!(g.theta[i], s0.theta[i] - 1.1);
        assert_eq!(g.omega[i], s0.omega[i] + 0.2);
    }

    let (pd, sd) = dilate_transform(&p, &s0, 2.0).unwrap();
    let before = InstanceSummary::from_state(&p, &s0).dimensionless();
    let after = InstanceSummary::from_state(&pd, &sd).dimensionless();
    assert_eq!(before, after);
    assert!(dilate_transform(&p, &s0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn direct_matches_naive_oracle((p, s) in instance(12)) {
        let (dt, dw) = rhs_inertial(&p, &s).unwrap();
        let (et, ew) = naive_rhs(p.m(), p.kappa(), p.nu(), &s.theta, &s.omega);
        for i in 0..p.n() {
            prop_assert_eq!(dt[i], et[i]);
            let scale = 1.0 + ew[i].abs();
            prop_assert!((dw[i] - ew[i]).abs() <= 1e-12 * scale, "{} vs {}", dw[i], ew[i]);
        }
    }

    #[test]
    fn mean_field_matches_direct((p, s) in instance(20)) {
        let (_, direct) = rhs_inertial_with(&p, &s, CouplingEval::Direct).unwrap();
        let (_, mf) = rhs_inertial_with(&p, &s, CouplingEval::MeanField).unwrap();
        let scale = 1.0 + p.kappa() / p.m();
        for i in 0..p.n() {
            prop_assert!((direct[i] - mf[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn first_order_mean_field_form((p, s) in instance(20)) {
        let order = order_state(&s.theta);
        prop_assume!(order.r > 1e-9);
        let phi = order.phi.unwrap();
        let f = rhs_first_order_with(&p, &s.theta, CouplingEval::Direct);
        for ((fi, nu), th) in f.iter().zip(p.nu()).zip(&s.theta) {
            let expected = nu - p.kappa() * order.r * (th - phi).sin();
            prop_assert!((fi - expected).abs() <= 1e-12 * (1.0 + p.kappa()));
        }
    }

    #[test]
    fn coupling_is_antisymmetric((p, s) in instance(20)) {
        // m ω̇_c + ω_c = ν_c at the level of the vector field
        let (_, dw) = rhs_inertial(&p, &s).unwrap();
        let n = p.n() as f64;
        let mean_acc = dw.iter().sum::<f64>() / n;
        let lhs = p.m() * mean_acc + s.omega_c();
        prop_assert!((lhs - p.nu_c()).abs() <= 1e-12 * (1.0 + p.kappa() + 3.0 + 3.0));
    }

    #[test]
    fn reflection_negates_rhs((p, s) in instance(12)) {
        let (dt, dw) = rhs_inertial(&p, &s).unwrap();
        let (pr, sr) = reflect(&p, &s).unwrap();
        let (rt, rw) = rhs_inertial(&pr, &sr).unwrap();
        for i in 0..p.n() {
            prop_assert_eq!(rt[i], -dt[i]);
            prop_assert!((rw[i] + dw[i]).abs() <= 1e-12 * (1.0 + dw[i].abs()));
        }
    }

    #[test]
    fn exchange_permutes_rhs(
        (p, s, perm) in instance(12).prop_flat_map(|(p, s)| {
            let ids: Vec<usize> = (0..p.n()).collect();
            (Just(p), Just(s), Just(ids).prop_shuffle())
        })
    ) {
        let n = p.n();
        let (_, dw) = rhs_inertial(&p, &s).unwrap();
        let (pp, sp) = permute(&p, &s, &perm).unwrap();
        let (_, pw) = rhs_inertial(&pp, &sp).unwrap();
        for i in 0..n {
            prop_assert!((pw[i] - dw[perm[i]]).abs() <= 1e-12 * (1.0 + dw[perm[i]].abs()));
        }
    }

    #[test]
    fn dilation_preserves_dimensionless_triple((p, s) in instance(8), alpha in 0.01f64..100.0) {
        prop_assume!(p.kappa() > 0.0);
        let (pd, sd) = dilate_transform(&p, &s, alpha).unwrap();
        let a = InstanceSummary::from_state(&p, &s).dimensionless();
        let b = InstanceSummary::from_state(&pd, &sd).dimensionless();
        // diameters are differences of scaled entries, so rounding is relative
        // to the entries rather than to the (possibly tiny) diameter
        let amax = |xs: &[f64]| xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let scales = [a.0, 2.0 * amax(p.nu()) / p.kappa(), 2.0 * amax(&s.omega) / p.kappa()];
        for ((x, y), scale) in [(a.0, b.0), (a.1, b.1), (a.2, b.2)].into_iter().zip(scales) {
            prop_assert!((x - y).abs() <= 1e-15 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn mean_trajectory_reproduces_initial_means((p, s) in instance(12)) {
        let mean = mean_closed_form(&p, &s).unwrap();
        prop_assert_eq!(mean.at(0.0), (s.theta_c(), s.omega_c()));
    }
}
