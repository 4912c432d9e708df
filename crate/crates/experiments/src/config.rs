//! Scenario configuration: JSON with defaults, strict field checking and
//! dotted-path overrides.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use kuramoto_lock_core::certifier::FreeParams;
use kuramoto_lock_core::diagnostics::LockTolerances;
use kuramoto_lock_core::{CouplingEval, IntegratorConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ExperimentError, Result};

/// JSON schema of [`ScenarioConfig`].
pub const SCENARIO_SCHEMA: &str = include_str!("../schema/scenario.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub instance: InstanceSource,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub lock: LockConfig,
    /// Certificates to evaluate; `None` runs every applicable one.
    #[serde(default)]
    pub certify: Option<Vec<CertifierKind>>,
    /// Free parameters for the `framework` certificate.
    #[serde(default)]
    pub free_params: Option<FreeParamsConfig>,
    #[serde(default)]
    pub collisions: bool,
    /// Arc length of the cluster tracked in the time series.
    #[serde(default = "default_cluster_arc")]
    pub cluster_arc: f64,
    /// Time at which R is sampled for sweep tables.
    #[serde(default = "default_probe_time")]
    pub probe_time: f64,
    /// Record the wall-clock time in the provenance block. Off by default so
    /// that records are byte-identical across runs.
    #[serde(default)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    /// Diameter of the natural frequencies.
    #[serde(default)]
    pub d_v: f64,
    /// Diameter of the initial frequencies.
    #[serde(default)]
    pub d_omega0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Inertial,
    FirstOrder,
}

/// Where the initial data and natural frequencies come from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// Uniform samples drawn from `seed`.
    #[default]
    Generated,
    /// Fully specified data; `params.d_v` and `params.d_omega0` are ignored.
    Explicit(ExplicitInstance),
    /// Only diameters and R⁰; enough to certify, not to simulate.
    Summary(SummaryInstance),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInstance {
    pub nu: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(default)]
    pub omega: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryInstance {
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Phases are drawn uniformly from [0, phase_arc).
    #[serde(default = "default_arc")]
    pub phase_arc: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { phase_arc: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Diagnostics are recorded every `stride` steps of size `dt`.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub coupling: CouplingEval,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            dt: default_dt(),
            stride: default_stride(),
            coupling: CouplingEval::default(),
        }
    }
}

/// Upper limit on the RK4 steps of one run.
pub const MAX_STEPS: f64 = 1e9;

impl IntegrationConfig {
    fn refinement(&self, model: ModelKind, m: f64) -> usize {
        match model {
            ModelKind::Inertial if self.dt > m / 2.0 => (self.dt / (m / 2.0)).ceil() as usize,
            _ => 1,
        }
    }

    /// Number of RK4 steps after refinement.
    pub fn step_count(&self, model: ModelKind, m: f64) -> f64 {
        (self.t_end / self.dt).ceil() * self.refinement(model, m) as f64
    }

    /// Step actually used: `dt` refined by an integer factor until it is at
    /// most m/2, which keeps RK4 stable on the e^{−t/m} relaxation. The
    /// stride is scaled by the same factor so snapshots keep their times.
    pub fn effective(&self, model: ModelKind, m: f64) -> IntegratorConfig<f64> {
        let factor = self.refinement(model, m);
        IntegratorConfig::new(self.dt / factor as f64, self.t_end)
            .with_stride(self.stride.saturating_mul(factor))
            .with_coupling(self.coupling)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LockConfig {
    /// Frequency tolerance; defaults to 1e−4·max(1, κ).
    #[serde(default)]
    pub eps_omega: Option<f64>,
    #[serde(default = "default_eps_theta")]
    pub eps_theta: f64,
    #[serde(default = "default_window")]
    pub window: f64,
}

impl Default for LockConfig {
    fn default() -> Self {
        Self {
            eps_omega: None,
            eps_theta: default_eps_theta(),
            window: default_window(),
        }
    }
}

impl LockConfig {
    pub fn tolerances(&self, kappa: f64) -> LockTolerances<f64> {
        let base = LockTolerances::defaults_for(kappa);
        LockTolerances {
            eps_omega: self.eps_omega.unwrap_or(base.eps_omega),
            eps_theta: self.eps_theta,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifierKind {
    Simple,
    Framework,
    N3,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParamsConfig {
    pub eta: f64,
    pub delta: f64,
    pub lambda: f64,
    pub ell: f64,
}

impl From<FreeParamsConfig> for FreeParams<f64> {
    fn from(f: FreeParamsConfig) -> Self {
        FreeParams {
            eta: f.eta,
            delta: f.delta,
            lambda: f.lambda,
            ell: f.ell,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_arc() -> f64 {
    TAU
}
fn default_t_end() -> f64 {
    200.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_stride() -> usize {
    10
}
fn default_eps_theta() -> f64 {
    1e-3
}
fn default_window() -> f64 {
    10.0
}
fn default_cluster_arc() -> f64 {
    FRAC_PI_2
}
fn default_probe_time() -> f64 {
    30.0
}

impl ScenarioConfig {
    /// Protocol defaults for `n` oscillators with the given parameters.
    pub fn new(n: usize, m: f64, kappa: f64, d_v: f64, d_omega0: f64) -> Self {
        Self {
            params: ParamsConfig { n, m, kappa, d_v, d_omega0 },
            seed: 0,
            model: ModelKind::default(),
            instance: InstanceSource::default(),
            initial: InitialConfig::default(),
            integration: IntegrationConfig::default(),
            lock: LockConfig::default(),
            certify: None,
            free_params: None,
            collisions: false,
            cluster_arc: default_cluster_arc(),
            probe_time: default_probe_time(),
            timestamp: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.integration.t_end = t_end;
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_with_overrides(text, &[])
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_path_with_overrides(path, &[])
    }

    pub fn from_path_with_overrides(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Self::from_json_with_overrides(&text, overrides)
    }

    /// Parses `text`, applies `KEY=VALUE` overrides in order (later ones win)
    /// and validates the result.
    pub fn from_json_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| ExperimentError::Parse {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        // reject malformed documents before overrides can mask the problem
        Self::from_value(value.clone())?;
        for spec in overrides {
            apply_override(&mut value, spec)?;
        }
        let config = Self::from_value(value)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        serde_path_to_error::deserialize(value).map_err(|e| ExperimentError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        let p = &self.params;
        if p.n == 0 {
            return bad("params.n must be at least 1".into());
        }
        let nonneg = [("params.kappa", p.kappa), ("params.d_v", p.d_v), ("params.d_omega0", p.d_omega0)];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if self.model == ModelKind::Inertial && !(p.m.is_finite() && p.m > 0.0) {
            return bad(format!("params.m must be positive for the inertial model, got {}", p.m));
        }
        let i = &self.integration;
        let positive = [
            ("integration.dt", i.dt),
            ("integration.t_end", i.t_end),
            ("lock.window", self.lock.window),
            ("lock.eps_theta", self.lock.eps_theta),
            ("cluster_arc", self.cluster_arc),
            ("initial.phase_arc", self.initial.phase_arc),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(eps) = self.lock.eps_omega {
            if !(eps.is_finite() && eps > 0.0) {
                return bad(format!("lock.eps_omega must be positive, got {eps}"));
            }
        }
        if i.stride == 0 {
            return bad("integration.stride must be at least 1".into());
        }
        let steps = i.step_count(self.model, p.m);
        if steps > MAX_STEPS {
            return bad(format!("integration needs {steps:e} steps, more than the limit of {MAX_STEPS:e}"));
        }
        if self.initial.phase_arc > TAU + 1e-12 {
            return bad(format!("initial.phase_arc must not exceed 2π, got {}", self.initial.phase_arc));
        }
        if !(self.probe_time.is_finite() && self.probe_time >= 0.0) {
            return bad(format!("probe_time must be non-negative, got {}", self.probe_time));
        }
        match &self.instance {
            InstanceSource::Explicit(e) => {
                let omega_len = e.omega.as_ref().map_or(p.n, Vec::len);
                if e.nu.len() != p.n || e.theta.len() != p.n || omega_len != p.n {
                    return bad(format!(
                        "explicit instance must have params.n = {} entries in nu, theta and omega",
                        p.n
                    ));
                }
                let all = e.nu.iter().chain(&e.theta).chain(e.omega.iter().flatten());
                if all.into_iter().any(|x| !x.is_finite()) {
                    return bad("explicit instance contains non-finite values".into());
                }
            }
            InstanceSource::Summary(s) => {
                if !(0.0..=1.0).contains(&s.r0) {
                    return bad(format!("instance.summary.r0 must lie in [0, 1], got {}", s.r0));
                }
            }
            InstanceSource::Generated => {}
        }
        if let Some(kinds) = &self.certify {
            if !kinds.is_empty() && p.kappa == 0.0 {
                return bad("certificates require kappa > 0".into());
            }
            if kinds.contains(&CertifierKind::Framework) && self.free_params.is_none() {
                return bad("the framework certificate needs free_params".into());
            }
        }
        Ok(())
    }
}

/// Applies one `a.b.c=VALUE` override. VALUE is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| ExperimentError::Override(spec.into(), "expected KEY=VALUE".into()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ExperimentError::Override(spec.into(), "empty path segment".into()));
    }
    let value: Value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().into()));
    let mut node = root;
    let segments: Vec<&str> = key.split('.').collect();
    for (k, seg) in segments.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ExperimentError::Override(spec.into(), format!("`{seg}` is not inside an object")))?;
        if k + 1 == segments.len() {
            match obj.insert((*seg).to_string(), value.clone()) {
                Some(old) => log::info!("override {key}: {old} -> {value}"),
                None => log::info!("override {key}: set to {value}"),
            }
            return Ok(());
        }
        node = obj.entry(seg.to_string()).or_insert(Value::Null);
    }
    unreachable!("path has at least one segment")
}
