//! Per-pair collision counts and the tail check for locked runs.

use kuramoto_lock_core::diagnostics::LockReport;
use kuramoto_lock_core::integrator::{indistinguishable, CollisionEvent};
use kuramoto_lock_core::{PhaseState, SystemParams};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{ExperimentError, Result};
use crate::run::run_scenario;

/// Largest mκ for which locked runs are expected to stop colliding.
pub const TAIL_MK_LIMIT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub i: usize,
    pub j: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionCensus {
    /// Pairs with at least one collision, in (i, j) order.
    pub per_pair: Vec<PairCount>,
    pub total: usize,
    /// Identical oscillators, which never collide and are not counted.
    pub excluded_pairs: Vec<(usize, usize)>,
    pub m_kappa: f64,
    pub t_end: f64,
    /// Start of the trailing half of the lock window.
    pub tail_start: f64,
    pub tail_collisions: usize,
    /// Whether the tail is collision-free; only asserted for locked runs with
    /// mκ ≤ 1/4, `None` otherwise.
    pub tail_ok: Option<bool>,
    /// Collisions strictly after the detected lock time.
    pub after_lock: Option<usize>,
}

impl CollisionCensus {
    pub fn count(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        self.per_pair.iter().find(|p| (p.i, p.j) == (i, j)).map_or(0, |p| p.count)
    }
}

/// Tallies `events` recorded over [0, t_end].
pub fn census_from_events(
    params: &SystemParams<f64>,
    state0: &PhaseState<f64>,
    events: &[CollisionEvent<f64>],
    t_end: f64,
    window: f64,
    lock: Option<&LockReport<f64>>,
) -> CollisionCensus {
    let n = params.n();
    let mut excluded = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if indistinguishable(params, state0, i, j) {
                excluded.push((i, j));
            }
        }
    }
    let mut per_pair: Vec<PairCount> = Vec::new();
    let mut sorted: Vec<(usize, usize)> = events.iter().map(|e| (e.i.min(e.j), e.i.max(e.j))).collect();
    sorted.sort_unstable();
    for (i, j) in sorted {
        match per_pair.last_mut() {
            Some(last) if (last.i, last.j) == (i, j) => last.count += 1,
            _ => per_pair.push(PairCount { i, j, count: 1 }),
        }
    }
    let m_kappa = params.m() * params.kappa();
    let tail_start = t_end - window / 2.0;
    let tail_collisions = events.iter().filter(|e| e.t_star >= tail_start).count();
    let locked = lock.is_some_and(|l| l.locked);
    let tail_ok = (locked && m_kappa <= TAIL_MK_LIMIT).then_some(tail_collisions == 0);
    let after_lock = lock
        .and_then(|l| l.t_lock)
        .map(|t| events.iter().filter(|e| e.t_star > t).count());
    CollisionCensus {
        per_pair,
        total: events.len(),
        excluded_pairs: excluded,
        m_kappa,
        t_end,
        tail_start,
        tail_collisions,
        tail_ok,
        after_lock,
    }
}

/// Runs the scenario with collision detection switched on and returns the
/// census.
pub fn collision_census(config: &ScenarioConfig) -> Result<CollisionCensus> {
    let mut config = config.clone();
    config.collisions = true;
    run_scenario(&config)?
        .collisions
        .map(|c| c.census)
        .ok_or_else(|| ExperimentError::Config("collision census is only available for the inertial model".into()))
}
