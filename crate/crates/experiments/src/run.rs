//! One scenario: generate, certify, integrate, diagnose.

use kuramoto_lock_core::certifier::{check_first_order, check_framework, check_n3, check_simple};
use kuramoto_lock_core::diagnostics::{
    detect_locking, diameters, energy, find_majority_cluster, order_state, potential, LockReport,
};
use kuramoto_lock_core::integrator::{
    detect_collisions_observed, integrate, integrate_first_order, CollisionEvent,
};
use kuramoto_lock_core::model::rhs_first_order_with;
use kuramoto_lock_core::{CertificateReport, IntegratorConfig, PhaseState, SystemParams};
use serde::Serialize;

use crate::census::{census_from_events, CollisionCensus};
use crate::config::{CertifierKind, InstanceSource, ModelKind, ScenarioConfig};
use crate::error::{ExperimentError, Result};
use crate::instance::{generate, Instance};

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Mean phase in (−π, π]; empty when R is too small to define it.
    pub phi: Option<f64>,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "D_theta")]
    pub d_theta: f64,
    #[serde(rename = "D_omega")]
    pub d_omega: f64,
    #[serde(rename = "P")]
    pub potential: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// Fraction of oscillators in the most populated arc of length
    /// `cluster_arc` (modulo 2π), and that cluster's diameter.
    pub cluster_fraction: f64,
    pub cluster_arc: f64,
}

impl SeriesRow {
    pub fn from_state(params: &SystemParams<f64>, state: &PhaseState<f64>, cluster_arc: f64) -> Self {
        let o = order_state(&state.theta);
        let (d_theta, d_omega) = diameters(state, None).expect("full set is non-empty");
        let n = state.theta.len();
        let cluster = find_majority_cluster(&state.theta, 1.0 / n as f64, cluster_arc)
            .expect("a single oscillator always forms a cluster");
        Self {
            t: state.t,
            r: o.r,
            phi: o.phi,
            delta: o.delta,
            d_theta,
            d_omega,
            potential: potential(params, &state.theta),
            energy: energy(params, state),
            cluster_fraction: cluster.fraction,
            cluster_arc: cluster.arc_diameter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCertificate {
    pub kind: CertifierKind,
    pub report: CertificateReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collisions {
    pub events: Vec<CollisionEvent<f64>>,
    pub census: CollisionCensus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub r_end: f64,
    pub delta_end: f64,
    /// R at the last snapshot not after `probe_time`.
    pub r_probe: Option<f64>,
    pub locked: bool,
    pub t_lock: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub package: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl Provenance {
    pub fn current(with_timestamp: bool) -> Self {
        let timestamp_unix = with_timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            rng: "ChaCha8 (rand_chacha 0.3, seed_from_u64)",
            timestamp_unix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub instance: Instance,
    /// Step, stride and horizon actually used.
    pub integration: IntegratorConfig<f64>,
    pub certificates: Vec<NamedCertificate>,
    pub summary: RunSummary,
    pub lock: LockReport<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collisions: Option<Collisions>,
    pub final_state: PhaseState<f64>,
    pub series: Vec<SeriesRow>,
    pub provenance: Provenance,
}

impl RunRecord {
    pub fn certificate(&self, kind: CertifierKind) -> Option<&CertificateReport<f64>> {
        self.certificates.iter().find(|c| c.kind == kind).map(|c| &c.report)
    }

    /// True when at least one certificate passed.
    pub fn certified(&self) -> bool {
        self.certificates.iter().any(|c| c.report.pass)
    }
}

/// Certificates requested by the config, or every applicable one.
pub fn certifiers_for(config: &ScenarioConfig) -> Vec<CertifierKind> {
    if let Some(kinds) = &config.certify {
        return kinds.clone();
    }
    if config.params.kappa <= 0.0 {
        return Vec::new();
    }
    match config.model {
        ModelKind::FirstOrder => vec![CertifierKind::FirstOrder],
        ModelKind::Inertial => {
            let mut kinds = vec![CertifierKind::Simple];
            if config.free_params.is_some() {
                kinds.push(CertifierKind::Framework);
            }
            if config.params.n == 3 {
                kinds.push(CertifierKind::N3);
            }
            kinds
        }
    }
}

/// Evaluates the certificates of `config`. Summary instances use the
/// configured diameters and R⁰; other instances use their actual data.
pub fn certify(config: &ScenarioConfig) -> Result<Vec<NamedCertificate>> {
    config.validate()?;
    let (params, r0, d_omega0) = match &config.instance {
        InstanceSource::Summary(s) => {
            let p = &config.params;
            if p.n < 2 && p.d_v > 0.0 {
                return Err(ExperimentError::Config("a positive d_v needs at least two oscillators".into()));
            }
            let mut nu = vec![0.0; p.n];
            if p.n >= 2 {
                nu[0] = -p.d_v / 2.0;
                nu[1] = p.d_v / 2.0;
            }
            let params = match config.model {
                ModelKind::Inertial => SystemParams::new(p.m, p.kappa, nu)?,
                ModelKind::FirstOrder => SystemParams::first_order(p.kappa, nu)?,
            };
            (params, s.r0, p.d_omega0)
        }
        _ => {
            let inst = generate(config)?;
            (inst.params(config)?, inst.r0, inst.d_omega0)
        }
    };
    evaluate(config, &params, r0, d_omega0)
}

fn evaluate(
    config: &ScenarioConfig,
    params: &SystemParams<f64>,
    r0: f64,
    d_omega0: f64,
) -> Result<Vec<NamedCertificate>> {
    certifiers_for(config)
        .into_iter()
        .map(|kind| {
            let report = match kind {
                CertifierKind::Simple => check_simple(params, r0, d_omega0)?,
                CertifierKind::Framework => {
                    let free = config
                        .free_params
                        .ok_or_else(|| ExperimentError::Config("the framework certificate needs free_params".into()))?;
                    check_framework(params, r0, d_omega0, &free.into())?
                }
                CertifierKind::N3 => check_n3(params)?,
                CertifierKind::FirstOrder => check_first_order(params, r0),
            };
            Ok(NamedCertificate { kind, report })
        })
        .collect()
}

/// Generates the instance, evaluates certificates, integrates and attaches
/// the diagnostics. Equal configs give equal records.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    if config.lock.window > config.integration.t_end {
        return Err(ExperimentError::Config(format!(
            "lock.window = {} exceeds integration.t_end = {}",
            config.lock.window, config.integration.t_end
        )));
    }
    let inst = generate(config)?;
    let params = inst.params(config)?;
    let state0 = inst.state0()?;
    let certificates = evaluate(config, &params, inst.r0, inst.d_omega0)?;
    let integration = config.integration.effective(config.model, config.params.m);

    let mut snapshots: Vec<PhaseState<f64>> = Vec::new();
    let mut series = Vec::new();
    let mut observe = |s: &PhaseState<f64>| {
        series.push(SeriesRow::from_state(&params, s, config.cluster_arc));
        snapshots.push(s.clone());
    };
    let mut events = None;
    let final_state = match config.model {
        ModelKind::Inertial if config.collisions => {
            let (ev, last) = detect_collisions_observed(&params, &state0, &integration, &mut observe)?;
            events = Some(ev);
            last
        }
        ModelKind::Inertial => integrate(&params, &state0, &integration, &mut observe)?,
        ModelKind::FirstOrder => {
            if config.collisions {
                return Err(ExperimentError::Config(
                    "collision detection is only available for the inertial model".into(),
                ));
            }
            let coupling = integration.coupling;
            let theta = integrate_first_order(&params, &inst.theta0, &integration, |t, th| {
                let omega = rhs_first_order_with(&params, th, coupling);
                observe(&PhaseState { t, theta: th.to_vec(), omega });
            })?;
            snapshots.last().cloned().unwrap_or(PhaseState {
                t: 0.0,
                omega: rhs_first_order_with(&params, &theta, coupling),
                theta,
            })
        }
    };

    let lock = detect_locking(&snapshots, params.nu_c(), &config.lock.tolerances(config.params.kappa))?;
    let collisions = events.map(|events| {
        let census = census_from_events(
            &params,
            &state0,
            &events,
            config.integration.t_end,
            config.lock.window,
            Some(&lock),
        );
        Collisions { events, census }
    });
    let last = series.last().expect("initial state is always observed");
    let r_probe = series
        .iter()
        .take_while(|row| row.t <= config.probe_time + 1e-9)
        .last()
        .map(|row| row.r);
    let summary = RunSummary {
        r_end: last.r,
        delta_end: last.delta,
        r_probe,
        locked: lock.locked,
        t_lock: lock.t_lock,
    };
    Ok(RunRecord {
        config: config.clone(),
        instance: inst,
        integration,
        certificates,
        summary,
        lock,
        collisions,
        final_state,
        series,
        provenance: Provenance::current(config.timestamp),
    })
}
