//! Certify-then-simulate campaigns: sample instances inside (or, for the
//! non-synchronizing family, outside) a certified region, run them and
//! check the certified conclusion.

use std::f64::consts::{PI, TAU};

use kuramoto_lock_core::certifier::{
    check_corollary, check_first_order, check_n3, check_simple, n3_threshold, theta_star,
};
use kuramoto_lock_core::diagnostics::{
    arrangement_check, initial_layer_slack, order_state, quasi_monotonicity_slack, subset_diameter,
};
use kuramoto_lock_core::integrator::{integrate, integrate_recorded, IntegratorConfig};
use kuramoto_lock_core::{CertificateReport, PhaseState, SystemParams};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::CollisionCensus;
use crate::config::{CertifierKind, ExplicitInstance, InstanceSource, ModelKind, ScenarioConfig};
use crate::error::Result;
use crate::instance::{rng_for, substream_seed, InstanceRng};
use crate::run::run_scenario;

/// Tolerances of the checked conclusions.
pub const QM_TOLERANCE: f64 = 1e-3;
pub const LAYER_TOLERANCE: f64 = 1e-6;
pub const PERSISTENCE_TOLERANCE: f64 = 1e-6;
pub const TAIL_TOLERANCE: f64 = 1e-3;
pub const ARRANGEMENT_TOLERANCE: f64 = 1e-3;

const MAX_ATTEMPTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignKind {
    /// Inertial instances passing the simple (x, y, z) condition.
    Simple,
    /// Three oscillators below the N = 3 threshold, adversarial initial data.
    N3,
    /// First-order instances with κ(R⁰)² > 1.6 D(V).
    FirstOrder,
    /// Constructed majority clusters passing the initial-data partial-locking
    /// certificate.
    Partial,
    /// Two bipolar groups with R⁰ = 0: certificates must fail and the
    /// ensemble must not lock.
    Nonsync,
}

impl std::str::FromStr for CampaignKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| format!("unknown campaign `{s}` (simple, n3, first_order, partial, nonsync)"))
    }
}

/// Ranges the samplers draw from. Kind-specific structure (phase arcs,
/// frequency budgets) lives in the samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerBounds {
    pub n_min: usize,
    pub n_max: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
}

impl SamplerBounds {
    pub fn defaults_for(kind: CampaignKind) -> Self {
        let (n_min, n_max) = match kind {
            CampaignKind::Simple => (2, 20),
            CampaignKind::N3 => (3, 3),
            CampaignKind::FirstOrder => (2, 30),
            CampaignKind::Partial => (8, 16),
            CampaignKind::Nonsync => (4, 12),
        };
        let (kappa_min, kappa_max) = match kind {
            CampaignKind::Partial => (0.8, 1.5),
            _ => (0.5, 2.0),
        };
        Self { n_min, n_max, kappa_min, kappa_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub kind: CampaignKind,
    pub n_instances: usize,
    pub seed: u64,
    pub t_end: f64,
    pub dt: f64,
    pub stride: usize,
    /// Horizon of the step-by-step quasi-monotonicity check.
    pub qm_horizon: f64,
    pub bounds: SamplerBounds,
}

impl CampaignSpec {
    pub fn new(kind: CampaignKind, n_instances: usize, seed: u64) -> Self {
        Self {
            kind,
            n_instances,
            seed,
            t_end: 200.0,
            dt: 0.01,
            stride: 10,
            qm_horizon: 20.0,
            bounds: SamplerBounds::defaults_for(kind),
        }
    }
}

/// A sampled instance together with the certificate inputs it was built for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledInstance {
    pub m: f64,
    pub kappa: f64,
    pub nu: Vec<f64>,
    pub theta0: Vec<f64>,
    pub omega0: Vec<f64>,
    /// Majority subset for partial-locking instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Label of the initial-data family (N = 3 campaigns).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<&'static str>,
}

impl SampledInstance {
    fn new(m: f64, kappa: f64, nu: Vec<f64>, theta0: Vec<f64>, omega0: Vec<f64>) -> Self {
        Self {
            m,
            kappa,
            nu,
            theta0,
            omega0,
            subset: None,
            lambda: None,
            ell: None,
            eta: None,
            family: None,
        }
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn r0(&self) -> f64 {
        order_state(&self.theta0).r
    }

    pub fn params(&self, kind: CampaignKind) -> SystemParams<f64> {
        let p = match kind {
            CampaignKind::FirstOrder => SystemParams::first_order(self.kappa, self.nu.clone()),
            _ => SystemParams::new(self.m, self.kappa, self.nu.clone()),
        };
        p.expect("sampler produces valid parameters")
    }

    pub fn state0(&self) -> PhaseState<f64> {
        PhaseState::new(0.0, self.theta0.clone(), self.omega0.clone()).expect("sampler produces valid states")
    }

    /// Scenario that replays this instance.
    pub fn scenario(&self, kind: CampaignKind, spec: &CampaignSpec) -> ScenarioConfig {
        let model = match kind {
            CampaignKind::FirstOrder => ModelKind::FirstOrder,
            _ => ModelKind::Inertial,
        };
        let mut c = ScenarioConfig::new(self.n(), self.m, self.kappa, 0.0, 0.0);
        c.model = model;
        c.instance = InstanceSource::Explicit(ExplicitInstance {
            nu: self.nu.clone(),
            theta: self.theta0.clone(),
            omega: (model == ModelKind::Inertial).then(|| self.omega0.clone()),
        });
        c.integration.t_end = spec.t_end;
        c.integration.dt = spec.dt;
        c.integration.stride = spec.stride;
        c.certify = Some(match kind {
            CampaignKind::FirstOrder => vec![CertifierKind::FirstOrder],
            CampaignKind::N3 => vec![CertifierKind::N3],
            _ => vec![CertifierKind::Simple],
        });
        c.collisions = kind == CampaignKind::N3;
        if kind == CampaignKind::Simple {
            c.lock.eps_omega = Some(1e-4);
        }
        c
    }
}

/// Predictions of the partial-locking certificate against observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialOutcome {
    pub ell: f64,
    pub persistence_from: f64,
    /// max 𝒟(Θ_A(t)) over every step with t ≥ persistence_from.
    pub persistence_max: f64,
    pub tail_start: f64,
    pub tail_diameter_bound: f64,
    pub tail_diameter_max: f64,
    pub arrangement_constant: f64,
    pub arrangement_min_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignOutcome {
    pub index: usize,
    /// Seed that reproduces the instance through [`sample_instance`].
    pub seed: u64,
    pub instance: SampledInstance,
    pub certificate: CertificateReport<f64>,
    pub locked: Option<bool>,
    pub t_lock: Option<f64>,
    pub qm_min_slack: Option<f64>,
    pub initial_layer_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CollisionCensus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial: Option<PartialOutcome>,
    /// Every violated expectation; empty for a consistent instance.
    pub defects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub outcomes: Vec<CampaignOutcome>,
    pub n_certified: usize,
    pub n_locked: usize,
    pub defects: Vec<Defect>,
}

impl CampaignReport {
    pub fn consistent(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Runs every instance of the campaign (in parallel) and collects outcomes in
/// index order.
pub fn certify_campaign(spec: &CampaignSpec) -> Result<CampaignReport> {
    let mut outcomes: Vec<CampaignOutcome> = (0..spec.n_instances)
        .into_par_iter()
        .map(|k| run_instance(spec, k))
        .collect::<Result<_>>()?;
    outcomes.sort_by_key(|o| o.index);
    let defects = outcomes
        .iter()
        .flat_map(|o| {
            o.defects.iter().map(|d| Defect {
                index: o.index,
                seed: o.seed,
                reason: d.clone(),
            })
        })
        .collect();
    Ok(CampaignReport {
        spec: *spec,
        n_certified: outcomes.iter().filter(|o| o.certificate.pass).count(),
        n_locked: outcomes.iter().filter(|o| o.locked == Some(true)).count(),
        outcomes,
        defects,
    })
}

fn run_instance(spec: &CampaignSpec, index: usize) -> Result<CampaignOutcome> {
    let seed = substream_seed(spec.seed, index);
    let Some(inst) = sample_instance(spec.kind, &spec.bounds, seed) else {
        let params = SystemParams::new(1.0, 1.0, vec![0.0])?;
        return Ok(CampaignOutcome {
            index,
            seed,
            instance: SampledInstance::new(1.0, 1.0, vec![0.0], vec![0.0], vec![0.0]),
            certificate: check_first_order(&params, 0.0),
            locked: None,
            t_lock: None,
            qm_min_slack: None,
            initial_layer_slack: None,
            census: None,
            partial: None,
            defects: vec![format!("sampler found no admissible instance in {MAX_ATTEMPTS} attempts")],
        });
    };
    match spec.kind {
        CampaignKind::Partial => run_partial(spec, index, seed, inst),
        _ => run_locking(spec, index, seed, inst),
    }
}

fn certificate_for(kind: CampaignKind, inst: &SampledInstance) -> Result<CertificateReport<f64>> {
    let params = inst.params(kind);
    let r0 = inst.r0();
    let d_omega0 = kuramoto_lock_core::model::diameter_of(&inst.omega0);
    Ok(match kind {
        CampaignKind::Simple | CampaignKind::Nonsync => check_simple(&params, r0, d_omega0)?,
        CampaignKind::N3 => check_n3(&params)?,
        CampaignKind::FirstOrder => check_first_order(&params, r0),
        CampaignKind::Partial => {
            let a = inst.subset.as_deref().expect("partial instance has a subset");
            let (lambda, ell, eta) = (inst.lambda.unwrap(), inst.ell.unwrap(), inst.eta.unwrap());
            check_corollary(&params, &inst.state0(), a, a, lambda, ell, eta)?
        }
    })
}

fn run_locking(spec: &CampaignSpec, index: usize, seed: u64, inst: SampledInstance) -> Result<CampaignOutcome> {
    let kind = spec.kind;
    let certificate = certificate_for(kind, &inst)?;
    let mut defects = Vec::new();
    let expect_lock = kind != CampaignKind::Nonsync;
    if certificate.pass != expect_lock {
        defects.push(format!(
            "certificate {} but the sampler targeted the {} region",
            if certificate.pass { "passed" } else { "failed" },
            if expect_lock { "certified" } else { "uncertified" }
        ));
    }
    let record = run_scenario(&inst.scenario(kind, spec))?;
    let locked = record.lock.locked;
    if locked != expect_lock {
        defects.push(if expect_lock {
            format!(
                "certified instance did not lock by t = {} (frequency spread {:e}, phase drift {:e})",
                spec.t_end, record.lock.omega_spread_final, record.lock.relative_phase_drift_final
            )
        } else {
            "non-synchronizing instance locked".to_string()
        });
    }
    let census = record.collisions.map(|c| c.census);
    if let Some(c) = &census {
        if c.tail_ok == Some(false) {
            defects.push(format!("{} collisions after t = {}", c.tail_collisions, c.tail_start));
        }
        if kind == CampaignKind::N3 && c.tail_ok.is_none() {
            defects.push("collision tail not checked (run did not lock or mκ > 1/4)".into());
        }
    }

    let (mut qm_min_slack, mut layer_slack) = (None, None);
    if kind == CampaignKind::Simple && certificate.pass {
        let (qm, layer) = a_priori_slacks(spec, &inst, &certificate)?;
        if qm < -QM_TOLERANCE {
            defects.push(format!("quasi-monotonicity slack {qm:e} below -{QM_TOLERANCE:e}"));
        }
        if layer < -LAYER_TOLERANCE {
            defects.push(format!("initial-layer slack {layer:e} below -{LAYER_TOLERANCE:e}"));
        }
        qm_min_slack = Some(qm);
        layer_slack = Some(layer);
    }
    Ok(CampaignOutcome {
        index,
        seed,
        instance: inst,
        certificate,
        locked: Some(locked),
        t_lock: record.lock.t_lock,
        qm_min_slack,
        initial_layer_slack: layer_slack,
        census,
        partial: None,
        defects,
    })
}

/// Quasi-monotonicity and initial-layer slacks on an every-step record over
/// [0, qm_horizon], with η, ζ(η) and ξ(η) taken from the certificate.
fn a_priori_slacks(
    spec: &CampaignSpec,
    inst: &SampledInstance,
    cert: &CertificateReport<f64>,
) -> Result<(f64, f64)> {
    let params = inst.params(CampaignKind::Simple);
    let eta = cert.free_params.expect("passing simple report has free parameters").eta;
    let xi = cert.quantities.xi_eta.expect("passing simple report has xi");
    let zeta = cert.quantities.zeta_eta.expect("passing simple report has zeta");
    let mut cfg = ScenarioConfig::new(inst.n(), inst.m, inst.kappa, 0.0, 0.0).integration;
    cfg.dt = spec.dt;
    cfg.stride = 1;
    cfg.t_end = spec.qm_horizon.min(spec.t_end);
    let cfg = cfg.effective(ModelKind::Inertial, inst.m).with_stride(1);
    let snaps = integrate_recorded(&params, &inst.state0(), &cfg)?;
    let qm = quasi_monotonicity_slack(&params, &snaps, xi, eta)
        .iter()
        .map(|s| s.1)
        .fold(f64::INFINITY, f64::min);
    Ok((qm, initial_layer_slack(&snaps, zeta, eta, inst.m)))
}

fn run_partial(spec: &CampaignSpec, index: usize, seed: u64, inst: SampledInstance) -> Result<CampaignOutcome> {
    let certificate = certificate_for(CampaignKind::Partial, &inst)?;
    let mut defects = Vec::new();
    let mut partial = None;
    match &certificate.predictions {
        None => defects.push("constructed instance is not certified".into()),
        Some(pred) => {
            let params = inst.params(CampaignKind::Partial);
            let a = inst.subset.clone().expect("partial instance has a subset");
            let cfg: IntegratorConfig<f64> = {
                let mut c = ScenarioConfig::new(inst.n(), inst.m, inst.kappa, 0.0, 0.0).integration;
                c.dt = spec.dt;
                c.t_end = spec.t_end;
                c.effective(ModelKind::Inertial, inst.m).with_stride(1)
            };
            let tail_every = spec.stride.max(1) * (spec.dt / cfg.dt).round().max(1.0) as usize;
            let tail_start = spec.t_end / 2.0;
            let mut persistence_max = 0.0f64;
            let mut tail = Vec::new();
            let mut step = 0usize;
            integrate(&params, &inst.state0(), &cfg, |s| {
                if s.t >= pred.persistence_from {
                    let d = subset_diameter(&s.theta, Some(&a)).expect("subset is valid");
                    persistence_max = persistence_max.max(d);
                }
                if s.t >= tail_start && step.is_multiple_of(tail_every) {
                    tail.push(s.clone());
                }
                step += 1;
            })?;
            let tail_diameter_max = tail
                .iter()
                .map(|s| subset_diameter(&s.theta, Some(&a)).expect("subset is valid"))
                .fold(0.0, f64::max);
            let arrangement = arrangement_check(&tail, &params, &a, pred.tail_diameter_bound, inst.lambda.unwrap());
            if persistence_max > pred.ell + PERSISTENCE_TOLERANCE {
                defects.push(format!("cluster diameter reached {persistence_max} > ell = {}", pred.ell));
            }
            if tail_diameter_max > pred.tail_diameter_bound + TAIL_TOLERANCE {
                defects.push(format!(
                    "tail diameter {tail_diameter_max} exceeds the bound {}",
                    pred.tail_diameter_bound
                ));
            }
            if !arrangement.holds(ARRANGEMENT_TOLERANCE) {
                defects.push(format!("arrangement slack {:e}", arrangement.min_slack));
            }
            partial = Some(PartialOutcome {
                ell: pred.ell,
                persistence_from: pred.persistence_from,
                persistence_max,
                tail_start,
                tail_diameter_bound: pred.tail_diameter_bound,
                tail_diameter_max,
                arrangement_constant: arrangement.constant,
                arrangement_min_slack: arrangement.min_slack,
            });
        }
    }
    Ok(CampaignOutcome {
        index,
        seed,
        instance: inst,
        certificate,
        locked: None,
        t_lock: None,
        qm_min_slack: None,
        initial_layer_slack: None,
        census: None,
        partial,
        defects,
    })
}

/// Draws the instance of a campaign member from its seed. Returns `None` when
/// rejection sampling exhausts its attempts.
pub fn sample_instance(kind: CampaignKind, bounds: &SamplerBounds, seed: u64) -> Option<SampledInstance> {
    let mut rng = rng_for(seed);
    (0..MAX_ATTEMPTS).find_map(|_| {
        let candidate = match kind {
            CampaignKind::Simple => sample_simple(&mut rng, bounds),
            CampaignKind::N3 => Some(sample_n3(&mut rng, bounds, seed)),
            CampaignKind::FirstOrder => sample_first_order(&mut rng, bounds),
            CampaignKind::Partial => sample_partial(&mut rng, bounds),
            CampaignKind::Nonsync => Some(sample_nonsync(&mut rng, bounds)),
        }?;
        let admissible = match certificate_for(kind, &candidate) {
            Ok(rep) => rep.pass == (kind != CampaignKind::Nonsync),
            Err(_) => false,
        };
        admissible.then_some(candidate)
    })
}

fn draw_n(rng: &mut InstanceRng, b: &SamplerBounds) -> usize {
    rng.gen_range(b.n_min..=b.n_max.max(b.n_min))
}

fn draw_kappa(rng: &mut InstanceRng, b: &SamplerBounds) -> f64 {
    if b.kappa_max > b.kappa_min {
        rng.gen_range(b.kappa_min..b.kappa_max)
    } else {
        b.kappa_min
    }
}

/// n values with diameter exactly `diameter` around a random center in
/// [−1, 1].
fn spread(rng: &mut InstanceRng, n: usize, diameter: f64) -> Vec<f64> {
    let center = rng.gen_range(-1.0..1.0);
    let half = diameter / 2.0;
    let mut v: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => center - half,
            1 => center + half,
            _ => center + rng.gen_range(-half..=half),
        })
        .collect();
    if n == 1 {
        v[0] = center;
    }
    v.shuffle(rng);
    v
}

/// Phases spread over an arc of width `width` around a random center.
fn arc_phases(rng: &mut InstanceRng, n: usize, width: f64) -> Vec<f64> {
    let c = rng.gen_range(0.0..TAU);
    (0..n).map(|_| c + width * (rng.gen::<f64>() - 0.5)).collect()
}

fn sample_simple(rng: &mut InstanceRng, b: &SamplerBounds) -> Option<SampledInstance> {
    let n = draw_n(rng, b);
    let kappa = draw_kappa(rng, b);
    let width = rng.gen_range(0.0..2.0);
    let theta0 = arc_phases(rng, n, width);
    let r2 = order_state(&theta0).r.powi(2);
    let x = rng.gen_range(0.0..0.6);
    let y = (rng.gen_range(0.005f64.ln()..0.05f64.ln())).exp();
    let z = rng.gen_range(0.0..1.0);
    let d_v = if n >= 2 { x * kappa * r2 } else { 0.0 };
    let m = y * r2 / kappa;
    let d_omega0 = if n >= 2 { z * kappa * r2 } else { 0.0 };
    let nu = spread(rng, n, d_v);
    let omega0 = spread(rng, n, d_omega0);
    Some(SampledInstance::new(m, kappa, nu, theta0, omega0))
}

const N3_FAMILIES: [&str; 3] = ["near_bipolar", "random", "large_omega"];

fn sample_n3(rng: &mut InstanceRng, b: &SamplerBounds, seed: u64) -> SampledInstance {
    let kappa = draw_kappa(rng, b);
    let a = rng.gen_range(0.002..0.05); // mκ
    let threshold: f64 = n3_threshold();
    // ξ∞/κ-free form: a·d + 2a + d/2 < threshold with d = D(V)/κ
    let d_max = (threshold - 2.0 * a) / (a + 0.5);
    let d = rng.gen_range(0.0..0.95) * d_max;
    let m = a / kappa;
    let nu = spread(rng, 3, d * kappa);
    let family = N3_FAMILIES[(seed % 3) as usize];
    let (theta0, omega0) = match family {
        "near_bipolar" => {
            let c = rng.gen_range(0.0..TAU);
            let e1 = rng.gen_range(-0.01..0.01);
            let e2 = rng.gen_range(-0.01..0.01);
            (vec![c, c + PI + e1, c + PI + e2], (0..3).map(|_| rng.gen_range(-0.01..0.01)).collect())
        }
        "random" => (
            (0..3).map(|_| rng.gen_range(0.0..TAU)).collect(),
            (0..3).map(|_| rng.gen_range(-1.0..1.0) * kappa).collect(),
        ),
        _ => (
            (0..3).map(|_| rng.gen_range(0.0..TAU)).collect(),
            (0..3).map(|_| rng.gen_range(-20.0..20.0) * kappa).collect(),
        ),
    };
    let mut inst = SampledInstance::new(m, kappa, nu, theta0, omega0);
    inst.family = Some(family);
    inst
}

fn sample_first_order(rng: &mut InstanceRng, b: &SamplerBounds) -> Option<SampledInstance> {
    let n = draw_n(rng, b);
    let kappa = draw_kappa(rng, b);
    let width = rng.gen_range(0.2..TAU);
    let theta0: Vec<f64> = if rng.gen_bool(0.3) {
        (0..n).map(|_| rng.gen_range(0.0..TAU)).collect()
    } else {
        arc_phases(rng, n, width)
    };
    let r0 = order_state(&theta0).r;
    if r0 < 0.05 {
        return None;
    }
    let d_v = if n >= 2 { rng.gen_range(0.0..0.98) * kappa * r0 * r0 / 1.6 } else { 0.0 };
    let nu = spread(rng, n, d_v);
    Some(SampledInstance::new(0.0, kappa, nu, theta0, vec![0.0; n]))
}

fn sample_partial(rng: &mut InstanceRng, b: &SamplerBounds) -> Option<SampledInstance> {
    let n = draw_n(rng, b);
    let kappa = draw_kappa(rng, b);
    let size = ((rng.gen_range(0.6..0.85) * n as f64).ceil() as usize).min(n - 1);
    let lambda = size as f64 / n as f64;
    let m = rng.gen_range(0.005..0.02) / kappa;
    let eta = rng.gen_range(2.0..5.0);
    let ell = theta_star(lambda);
    let width = rng.gen_range(0.05..0.35);
    let center = rng.gen_range(0.0..TAU);
    let nu_spread = rng.gen_range(0.002..0.02) * kappa;
    let mut nu = Vec::with_capacity(n);
    let mut theta0 = Vec::with_capacity(n);
    for k in 0..size {
        theta0.push(center - width / 2.0 + width * k as f64 / (size - 1).max(1) as f64);
        nu.push(rng.gen_range(-nu_spread / 2.0..nu_spread / 2.0));
    }
    for _ in size..n {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        nu.push(sign * rng.gen_range(2.5..4.5) * kappa);
        theta0.push(center + rng.gen_range(1.0..TAU - 1.0));
    }
    let omega0: Vec<f64> = nu.iter().map(|v| v + rng.gen_range(-0.05..0.05) * kappa).collect();
    let mut inst = SampledInstance::new(m, kappa, nu, theta0, omega0);
    inst.subset = Some((0..size).collect());
    inst.lambda = Some(lambda);
    inst.ell = Some(ell);
    inst.eta = Some(eta);
    Some(inst)
}

fn sample_nonsync(rng: &mut InstanceRng, b: &SamplerBounds) -> SampledInstance {
    // two groups, each split evenly between antipodal phases
    let half = (draw_n(rng, b) / 4).max(1) * 2;
    let kappa = draw_kappa(rng, b);
    let m = rng.gen_range(0.05..1.0) / kappa;
    let base = rng.gen_range(-1.0..1.0);
    let gap = rng.gen_range(3.0..5.0) * kappa;
    let (phase_a, phase_b) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
    let mut nu = Vec::new();
    let mut theta0 = Vec::new();
    for (phase, freq) in [(phase_a, base), (phase_b, base + gap)] {
        for k in 0..half {
            nu.push(freq);
            theta0.push(phase + if k % 2 == 0 { 0.0 } else { PI });
        }
    }
    let omega0 = vec![0.0; theta0.len()];
    SampledInstance::new(m, kappa, nu, theta0, omega0)
}
