use std::f64::consts::PI;

use kuramoto_lock_core::diagnostics::{detect_locking, order_state, propagation_slack, LockTolerances};
use kuramoto_lock_core::integrator::{
    detect_collisions, detect_collisions_observed, integrate, integrate_first_order, integrate_recorded,
    IntegratorConfig,
};
use kuramoto_lock_core::model::{
    dilate_transform, galilean_transform, mean_closed_form, nonsync_exact, GalileanShift, PhaseState,
    SystemParams,
};
use kuramoto_lock_core::scalar::wrap_pi;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(seed: u64, n: usize, m: f64, kappa: f64) -> (SystemParams<f64>, PhaseState<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let theta = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let omega = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (SystemParams::new(m, kappa, nu).unwrap(), PhaseState::new(0.0, theta, omega).unwrap())
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn bipolar_pair() -> (SystemParams<f64>, PhaseState<f64>) {
    let p = SystemParams::new(0.1, 1.0, vec![1.0, 1.0, 2.0, 2.0]).unwrap();
    let s = PhaseState::new(0.0, vec![0.0, PI, 0.0, PI], vec![0.0; 4]).unwrap();
    (p, s)
}

#[test]
fn uncoupled_rest_state_is_constant() {
    let p = SystemParams::new(0.5, 0.0, vec![0.0; 3]).unwrap();
    let s = PhaseState::at_rest(vec![0.1, 2.0, -1.0]).unwrap();
    let snaps = integrate_recorded(&p, &s, &IntegratorConfig::standard(5.0)).unwrap();
    assert!(snaps.iter().all(|x| x.theta == s.theta && x.omega == s.omega));
}

#[test]
fn nonsync_matches_closed_form() {
    let (p, s) = bipolar_pair();
    let exact = nonsync_exact(&p, &s, &[vec![0, 1], vec![2, 3]]).unwrap();
    let mut worst = 0.0f64;
    let mut worst_r = 0.0f64;
    integrate(&p, &s, &IntegratorConfig::standard(30.0), |x| {
        let e = exact.state_at(x.t);
        worst = worst.max(sup_diff(&x.theta, &e.theta));
        worst_r = worst_r.max(order_state(&x.theta).r);
    })
    .unwrap();
    assert!(worst < 1e-6, "max phase error {worst}");
    assert!(worst_r < 1e-6, "R drifted to {worst_r}");
    for k in 0..100 {
        let t = 0.3 * k as f64;
        assert!(order_state(&exact.state_at(t).theta).r < 1e-12);
    }
}

#[test]
fn fourth_order_convergence() {
    let (p, s) = random_instance(11, 5, 1.0, 1.5);
    let t_end = 5.0;
    let reference = integrate(&p, &s, &IntegratorConfig::new(0.0005, t_end), |_| {}).unwrap();
    let coarse = integrate(&p, &s, &IntegratorConfig::new(0.04, t_end), |_| {}).unwrap();
    let fine = integrate(&p, &s, &IntegratorConfig::new(0.02, t_end), |_| {}).unwrap();
    let e1 = sup_diff(&coarse.theta, &reference.theta);
    let e2 = sup_diff(&fine.theta, &reference.theta);
    let ratio = e1 / e2;
    assert!((8.0..=32.0).contains(&ratio), "error ratio {ratio} ({e1} / {e2})");
}

#[test]
fn galilean_commutes_with_flow() {
    let (p, s) = random_instance(5, 5, 0.4, 1.2);
    let shift = GalileanShift { nu: 0.35, theta: -0.8, omega: 0.6 };
    let cfg = IntegratorConfig::standard(10.0).reference();
    let mut worst = 0.0f64;
    let solved = integrate_recorded(&p, &s, &cfg).unwrap();
    let (pg, sg) = galilean_transform(&p, &s, shift).unwrap();
    let shifted = integrate_recorded(&pg, &sg, &cfg).unwrap();
    assert_eq!(solved.len(), shifted.len());
    for (a, b) in solved.iter().zip(&shifted) {
        let (_, ta) = galilean_transform(&p, a, shift).unwrap();
        worst = worst.max(sup_diff(&ta.theta, &b.theta)).max(sup_diff(&ta.omega, &b.omega));
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn dilation_rescales_time() {
    let (p, s) = random_instance(6, 4, 0.3, 0.9);
    let alpha = 2.0;
    let (pd, sd) = dilate_transform(&p, &s, alpha).unwrap();
    for t in [1.0, 4.0, 10.0] {
        let a = integrate(&p, &s, &IntegratorConfig::new(0.0005, t), |_| {}).unwrap();
        let b = integrate(&pd, &sd, &IntegratorConfig::new(0.0005 / alpha, t / alpha), |_| {}).unwrap();
        assert!(sup_diff(&a.theta, &b.theta) < 1e-8);
    }
}

#[test]
fn mean_follows_closed_form() {
    let (p, s) = random_instance(50, 50, 0.7, 2.0);
    let mean = mean_closed_form(&p, &s).unwrap();
    let mut worst = 0.0f64;
    integrate(&p, &s, &IntegratorConfig::standard(30.0).with_stride(10), |x| {
        let (tc, wc) = mean.at(x.t);
        worst = worst.max((x.theta_c() - tc).abs()).max((x.omega_c() - wc).abs());
    })
    .unwrap();
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn propagation_bounds_hold_along_run() {
    for seed in 0..4 {
        let (p, s) = random_instance(100 + seed, 8, 0.2 + seed as f64 * 0.3, 1.0 + seed as f64);
        integrate(&p, &s, &IntegratorConfig::standard(20.0).with_stride(5), |x| {
            let slack = propagation_slack(&p, &s, x);
            assert!(slack.min() > -1e-6, "t = {}: {slack:?}", x.t);
        })
        .unwrap();
    }
}

#[test]
fn decoupled_first_order_is_linear_drift() {
    let p = SystemParams::first_order(0.0, vec![0.3, -1.2, 2.5]).unwrap();
    let theta0 = [0.1_f64, 0.2, -0.3];
    integrate_first_order(&p, &theta0, &IntegratorConfig::standard(7.0), |t: f64, th: &[f64]| {
        for i in 0..3 {
            assert!((th[i] - (theta0[i] + p.nu()[i] * t)).abs() < 1e-12);
        }
    })
    .unwrap();
}

#[test]
fn identical_first_order_order_parameter_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = SystemParams::first_order(1.0, vec![0.4; 20]).unwrap();
    let theta0: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let mut last = 0.0;
    integrate_first_order(&p, &theta0, &IntegratorConfig::standard(20.0).with_stride(10), |_, th| {
        let r = order_state(th).r;
        assert!(r >= last - 1e-12, "{r} < {last}");
        last = r;
    })
    .unwrap();
    assert!(last > 0.999);
}

#[test]
fn small_inertia_tracks_first_order() {
    let (p, s) = random_instance(9, 5, 1e-4, 1.0);
    let first = SystemParams::first_order(1.0, p.nu().to_vec()).unwrap();
    let dt = 2.5e-5;
    let cfg = IntegratorConfig::new(dt, 10.0).with_stride(4000);
    let inertial = integrate_recorded(&p, &PhaseState::at_rest(s.theta.clone()).unwrap(), &cfg).unwrap();
    let mut reduced = Vec::new();
    integrate_first_order(&first, &s.theta, &cfg, |t, th| reduced.push((t, th.to_vec()))).unwrap();
    assert_eq!(inertial.len(), reduced.len());
    let mut worst = 0.0f64;
    for (a, (t, b)) in inertial.iter().zip(&reduced) {
        assert!((a.t - t).abs() < 1e-9);
        if *t >= 1.0 {
            worst = worst.max(sup_diff(&a.theta, b));
        }
    }
    assert!(worst < 1e-3, "{worst}");
}

/// Roots of t − m + m e^{−t/m} = 2πk by Newton from the drift asymptote.
fn drift_root(target: f64, m: f64) -> f64 {
    let mut t = target + m;
    for _ in 0..60 {
        let f = t - m + m * (-t / m).exp() - target;
        let df = 1.0 - (-t / m).exp();
        t -= f / df;
    }
    t
}

#[test]
fn nonsync_collision_times_match_closed_form() {
    let (p, s) = bipolar_pair();
    let cfg = IntegratorConfig::standard(40.0);
    let events = detect_collisions(&p, &s, &cfg).unwrap();
    let pair: Vec<_> = events.iter().filter(|e| (e.i, e.j) == (0, 2) && e.t_star > 1e-9).collect();
    // θ_0 − θ_2 = −g(t) crosses every −2πk
    let expected: Vec<f64> = (1..).map(|k| drift_root(2.0 * PI * k as f64, 0.1)).take_while(|&t| t < 40.0).collect();
    assert_eq!(pair.len(), expected.len());
    for (e, t) in pair.iter().zip(&expected) {
        assert!((e.t_star - t).abs() < 1e-6, "{} vs {t}", e.t_star);
    }
    // same-group members never meet
    assert!(events.iter().all(|e| (e.i, e.j) != (0, 1) && (e.i, e.j) != (2, 3)));
}

#[test]
fn refined_events_sit_on_the_collision_set() {
    let (p, s) = random_instance(21, 4, 0.5, 0.2);
    let cfg = IntegratorConfig::standard(30.0);
    let events = detect_collisions(&p, &s, &cfg).unwrap();
    assert!(!events.is_empty());
    for e in events.iter().take(40) {
        // integrating to t_star reproduces the refinement sub-step exactly
        let at = integrate(&p, &s, &IntegratorConfig::new(cfg.dt, e.t_star), |_| {}).unwrap();
        let residual = at.theta[e.i] - at.theta[e.j] - 2.0 * PI * e.branch as f64;
        assert!(residual.abs() <= 1e-9, "{e:?}: {residual}");
        assert!(wrap_pi(at.theta[e.i] - at.theta[e.j]).abs() <= 1e-9);
    }
}

#[test]
fn runs_are_deterministic() {
    let (p, s) = random_instance(8, 6, 0.3, 0.5);
    let cfg = IntegratorConfig::standard(15.0).with_stride(7);
    let a = detect_collisions_observed(&p, &s, &cfg, |_| {}).unwrap();
    let b = detect_collisions_observed(&p, &s, &cfg, |_| {}).unwrap();
    assert_eq!(a, b);
    assert_eq!(integrate_recorded(&p, &s, &cfg).unwrap(), integrate_recorded(&p, &s, &cfg).unwrap());
}

#[test]
fn certified_triple_stops_colliding_before_lock() {
    let p = SystemParams::new(0.01, 1.0, vec![-0.05, 0.0, 0.05]).unwrap();
    let s = PhaseState::new(0.0, vec![0.0, PI - 0.01, PI + 0.02], vec![2.0, -1.0, 0.5]).unwrap();
    let cfg = IntegratorConfig::standard(200.0).with_stride(10);
    let mut snaps = Vec::new();
    let (events, _) = detect_collisions_observed(&p, &s, &cfg, |x| snaps.push(x.clone())).unwrap();
    let lock = detect_locking(&snaps, p.nu_c(), &LockTolerances::defaults_for(1.0)).unwrap();
    assert!(lock.locked, "{lock:?}");
    let t_lock = lock.t_lock.unwrap();
    assert!(events.iter().all(|e| e.t_star <= t_lock), "{events:?} after {t_lock}");
}
