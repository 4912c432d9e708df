//! Embedded invariant suites: closed-form identities, symmetry equivalences
//! and comparisons against exact solutions. Reference values are computed
//! here independently of the library.

use std::f64::consts::PI;

use kuramoto_lock_experiments::core::certifier::{
    check_first_order, check_simple, f_lambda, f_max, f_max_radical, f_zero, n3_threshold, phi_roots,
    selection_bounds_suite, theta_star,
};
use kuramoto_lock_experiments::core::diagnostics::{
    detect_locking, energy, energy_dissipation_residual, order_state, potential, potential_via_order,
    propagation_slack, LockTolerances,
};
use kuramoto_lock_experiments::core::integrator::{integrate, integrate_recorded, IntegratorConfig};
use kuramoto_lock_experiments::core::model::{
    dilate_transform, galilean_transform, mean_closed_form, nonsync_exact, GalileanShift, PhaseState, SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative error injected into a reference constant by the test hook.
const PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    /// Upper limit for errors, lower limit for slacks.
    pub limit: f64,
    pub pass: bool,
}

fn at_most(name: &'static str, measured: f64, limit: f64) -> Check {
    Check { name, measured, limit, pass: measured <= limit }
}

fn at_least(name: &'static str, measured: f64, limit: f64) -> Check {
    Check { name, measured, limit, pass: measured >= limit }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_instance(seed: u64, n: usize) -> (SystemParams<f64>, PhaseState<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(0.1..2.0);
    let kappa = rng.gen_range(0.2..3.0);
    let nu = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let theta = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let omega = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (SystemParams::new(m, kappa, nu).unwrap(), PhaseState::new(0.0, theta, omega).unwrap())
}

fn n3_radical(perturb: bool) -> Check {
    let mut reference = ((69.0 - 11.0 * 33f64.sqrt()) / 6.0).sqrt() / 8.0;
    if perturb {
        reference *= 1.0 + PERTURBATION;
    }
    at_most("n3 threshold radical", (n3_threshold::<f64>() - reference).abs(), 1e-15)
}

fn f_max_closed_form() -> Check {
    let err = (1..=100)
        .map(|i| 0.5 + 0.5 * i as f64 / 100.0)
        .map(|l| (f_max(l) - f_max_radical(l)).abs().max((f_lambda(l, theta_star(l)) - f_max(l)).abs()))
        .fold(0.0, f64::max);
    at_most("arc maximum closed form", err, 1e-12)
}

fn roots() -> (Check, Check) {
    let (mut err, mut bad) = (0.0f64, 0.0);
    for i in 1..=20 {
        let l = 0.5 + 0.5 * i as f64 / 20.0;
        for j in 1..=20 {
            let d = f_max(l) * j as f64 / 21.0;
            match phi_roots(l, d) {
                Ok((p1, p2)) => {
                    err = err.max((f_lambda(l, p1) - d).abs()).max((f_lambda(l, p2) - d).abs());
                    if !(0.0 < p1 && p1 < theta_star(l) && theta_star(l) < p2 && p2 < f_zero(l)) {
                        bad += 1.0;
                    }
                }
                Err(_) => bad += 1.0,
            }
        }
    }
    (at_most("arc root residual", err, 1e-12), at_most("arc root ordering violations", bad, 0.0))
}

fn selection_bounds() -> Check {
    let suite = selection_bounds_suite(1000);
    let slack = suite.slack.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut c = at_least("parameter selection slack", slack, 0.0);
    c.pass &= suite.pass && slack > 0.0;
    c
}

fn xyz_examples() -> Check {
    let certified = [(0.5, 0.015, 0.12), (0.3, 0.05, 0.76)]
        .iter()
        .filter(|&&(x, y, z)| {
            let nu = (0..6).map(|k| x * k as f64 / 5.0).collect();
            let p = SystemParams::new(y, 1.0, nu).unwrap();
            check_simple(&p, 1.0, z).map(|r| r.pass).unwrap_or(false)
        })
        .count();
    at_least("reduced-variable examples", certified as f64, 2.0)
}

fn first_order_boundary() -> Check {
    let pass = |kappa: f64| check_first_order(&SystemParams::first_order(kappa, vec![0.0, 1.0]).unwrap(), 0.5).pass;
    let ok = pass(6.5) && !pass(6.0);
    Check { name: "first-order boundary pair", measured: ok as u8 as f64, limit: 1.0, pass: ok }
}

fn nonsync() -> Check {
    let p = SystemParams::new(0.1, 1.0, vec![1.0, 1.0, 2.0, 2.0]).unwrap();
    let s = PhaseState::new(0.0, vec![0.0, PI, 0.0, PI], vec![0.0; 4]).unwrap();
    let exact = nonsync_exact(&p, &s, &[vec![0, 1], vec![2, 3]]).unwrap();
    let mut err = 0.0f64;
    integrate(&p, &s, &IntegratorConfig::new(0.01, 30.0), |x| {
        err = err.max(sup_diff(&x.theta, &exact.state_at(x.t).theta));
        err = err.max(order_state(&x.theta).r);
    })
    .unwrap();
    at_most("exact non-synchronizing solution", err, 1e-6)
}

fn mean_conservation() -> Check {
    let (p, s) = random_instance(2, 50);
    let closed = mean_closed_form(&p, &s).unwrap();
    let mut err = 0.0f64;
    integrate(&p, &s, &IntegratorConfig::new(0.01, 30.0), |x| {
        let (tc, wc) = closed.at(x.t);
        err = err.max((x.theta_c() - tc).abs()).max((x.omega_c() - wc).abs());
    })
    .unwrap();
    at_most("phase and frequency averages", err, 1e-6)
}

fn symmetries() -> (Check, Check) {
    let (mut gal, mut dil) = (0.0f64, 0.0f64);
    for seed in 0..3 {
        let (p, s) = random_instance(30 + seed, 5);
        let cfg = IntegratorConfig::new(0.002, 5.0).with_stride(100);
        let snaps = integrate_recorded(&p, &s, &cfg).unwrap();
        let shift = GalileanShift { nu: 0.7, theta: -1.1, omega: 0.4 };
        let (pg, sg) = galilean_transform(&p, &s, shift).unwrap();
        for (a, b) in snaps.iter().zip(integrate_recorded(&pg, &sg, &cfg).unwrap()) {
            let (_, e) = galilean_transform(&p, a, shift).unwrap();
            gal = gal.max(sup_diff(&e.theta, &b.theta)).max(sup_diff(&e.omega, &b.omega));
        }
        let alpha = 1.7;
        let (pd, sd) = dilate_transform(&p, &s, alpha).unwrap();
        let dcfg = IntegratorConfig::new(0.002 / alpha, 5.0 / alpha).with_stride(100);
        for (a, b) in snaps.iter().zip(integrate_recorded(&pd, &sd, &dcfg).unwrap()) {
            let (_, e) = dilate_transform(&p, a, alpha).unwrap();
            dil = dil.max(sup_diff(&e.theta, &b.theta)).max(sup_diff(&e.omega, &b.omega));
        }
    }
    (at_most("Galilean commutation", gal, 1e-8), at_most("dilation commutation", dil, 1e-8))
}

fn propagation() -> Check {
    let mut worst = f64::INFINITY;
    for seed in 0..5 {
        let (p, s) = random_instance(40 + seed, 8);
        integrate(&p, &s, &IntegratorConfig::new(0.01, 20.0), |x| {
            worst = worst.min(propagation_slack(&p, &s, x).min());
        })
        .unwrap();
    }
    at_least("frequency propagation bounds", worst, -1e-6)
}

fn dissipation() -> (Check, Check, Check) {
    let (p0, s) = random_instance(50, 10);
    let p = p0.with_nu(vec![0.3; 10]).unwrap();
    let snaps = integrate_recorded(&p, &s, &IntegratorConfig::new(0.005, 10.0)).unwrap();
    let rise = snaps
        .windows(2)
        .map(|w| energy(&p, &w[1]) - energy(&p, &w[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    let resid = energy_dissipation_residual(&p, &snaps)
        .unwrap()
        .iter()
        .map(|&(_, r)| r.abs())
        .fold(0.0, f64::max);
    let pot = snaps
        .iter()
        .map(|x| (potential(&p0, &x.theta) - potential_via_order(&p0, &x.theta)).abs())
        .fold(0.0, f64::max);
    (
        at_most("energy increase", rise, 1e-8),
        at_most("energy dissipation residual", resid, 1e-3),
        at_most("potential via order parameter", pot, 1e-9),
    )
}

fn identical_lock() -> Check {
    let (p0, s) = random_instance(60, 8);
    let p = p0.with_nu(vec![0.0; 8]).unwrap();
    let snaps = integrate_recorded(&p, &s, &IntegratorConfig::new(0.01, 200.0).with_stride(10)).unwrap();
    let rep = detect_locking(&snaps, p.nu_c(), &LockTolerances::defaults_for(p.kappa())).unwrap();
    Check {
        name: "identical oscillators lock",
        measured: rep.omega_spread_final,
        limit: LockTolerances::defaults_for(p.kappa()).eps_omega,
        pass: rep.locked,
    }
}

pub fn run(perturb: bool) -> Vec<Check> {
    let (root_err, root_order) = roots();
    let (gal, dil) = symmetries();
    let (rise, resid, pot) = dissipation();
    vec![
        n3_radical(perturb),
        f_max_closed_form(),
        root_err,
        root_order,
        selection_bounds(),
        xyz_examples(),
        first_order_boundary(),
        nonsync(),
        mean_conservation(),
        gal,
        dil,
        propagation(),
        rise,
        resid,
        pot,
        identical_lock(),
    ]
}
