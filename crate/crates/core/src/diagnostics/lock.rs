use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::model::PhaseState;
use crate::scalar::Scalar;

/// Thresholds of the numeric phase-locking criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LockTolerances<T> {
    pub eps_omega: T,
    pub eps_theta: T,
    pub window: T,
}

impl<T: Scalar> LockTolerances<T> {
    /// ε_ω = 1e−4·max(1, κ), ε_θ = 1e−3, window 10.
    pub fn defaults_for(kappa: T) -> Self {
        Self {
            eps_omega: T::lit(1e-4) * kappa.max(T::one()),
            eps_theta: T::lit(1e-3),
            window: T::lit(10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockReport<T> {
    pub locked: bool,
    /// Start of the earliest window after which every window passes.
    pub t_lock: Option<T>,
    /// max_i |ω_i − ν_c| over the trailing window.
    pub omega_spread_final: T,
    /// Largest oscillation of θ_i − θ_j over the trailing window.
    pub relative_phase_drift_final: T,
}

/// Sliding max/min over a stream, by monotone deques.
struct Extremes<T> {
    max: VecDeque<(usize, T)>,
    min: VecDeque<(usize, T)>,
}

impl<T: Scalar> Extremes<T> {
    fn new() -> Self {
        Self {
            max: VecDeque::new(),
            min: VecDeque::new(),
        }
    }

    fn push(&mut self, k: usize, x: T) {
        while self.max.back().is_some_and(|&(_, v)| v <= x) {
            self.max.pop_back();
        }
        self.max.push_back((k, x));
        while self.min.back().is_some_and(|&(_, v)| v >= x) {
            self.min.pop_back();
        }
        self.min.push_back((k, x));
    }

    fn evict_before(&mut self, k: usize) {
        while self.max.front().is_some_and(|&(i, _)| i < k) {
            self.max.pop_front();
        }
        while self.min.front().is_some_and(|&(i, _)| i < k) {
            self.min.pop_front();
        }
    }

    fn range(&self) -> T {
        match (self.max.front(), self.min.front()) {
            (Some(&(_, hi)), Some(&(_, lo))) => hi - lo,
            _ => T::zero(),
        }
    }

    fn max(&self) -> T {
        self.max.front().map_or(T::zero(), |&(_, v)| v)
    }
}

/// A window starting at snapshot `s` holds every snapshot with
/// t ≤ t_s + window. It passes when max_i |ω_i − ν_c| < ε_ω and every pairwise
/// phase difference oscillates by less than ε_θ inside it. Windows are tried at
/// every snapshot whose window fits in the record; the run is locked when the
/// trailing window passes.
pub fn detect_locking<T: Scalar>(
    snapshots: &[PhaseState<T>],
    nu_c: T,
    tol: &LockTolerances<T>,
) -> Result<LockReport<T>, DiagnosticsError> {
    if snapshots.len() < 2 {
        return Err(DiagnosticsError::TooFewSnapshots {
            needed: 2,
            got: snapshots.len(),
        });
    }
    if !(tol.window > T::zero()) {
        return Err(DiagnosticsError::InvalidArgument("window must be positive".into()));
    }
    let t_first = snapshots[0].t;
    let t_last = snapshots[snapshots.len() - 1].t;
    let slack = tol.window * T::lit(1e-9);
    if t_last - t_first < tol.window - slack {
        return Err(DiagnosticsError::WindowTooLong {
            span: (t_last - t_first).to_f64().unwrap_or(f64::NAN),
            window: tol.window.to_f64().unwrap_or(f64::NAN),
        });
    }

    let n = snapshots[0].theta.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut gaps: Vec<Extremes<T>> = pairs.iter().map(|_| Extremes::new()).collect();
    let mut spread = Extremes::new();

    let mut end = 0usize; // next snapshot to admit
    let mut last_fail: Option<usize> = None;
    let mut last_start = 0usize;
    let mut final_omega = T::zero();
    let mut final_drift = T::zero();
    for start in 0..snapshots.len() {
        let horizon = snapshots[start].t + tol.window;
        if horizon > t_last + slack {
            break;
        }
        while end < snapshots.len() && snapshots[end].t <= horizon + slack {
            let s = &snapshots[end];
            let dev = s.omega.iter().map(|&w| (w - nu_c).abs()).fold(T::zero(), T::max);
            spread.push(end, dev);
            for (e, &(i, j)) in gaps.iter_mut().zip(&pairs) {
                e.push(end, s.theta[i] - s.theta[j]);
            }
            end += 1;
        }
        spread.evict_before(start);
        gaps.iter_mut().for_each(|e| e.evict_before(start));
        let omega = spread.max();
        let drift = gaps.iter().map(Extremes::range).fold(T::zero(), T::max);
        if !(omega < tol.eps_omega && drift < tol.eps_theta) {
            last_fail = Some(start);
        }
        last_start = start;
        final_omega = omega;
        final_drift = drift;
    }

    let locked = last_fail != Some(last_start);
    let t_lock = if locked {
        Some(match last_fail {
            None => snapshots[0].t,
            Some(k) => snapshots[k + 1].t,
        })
    } else {
        None
    };
    Ok(LockReport {
        locked,
        t_lock,
        omega_spread_final: final_omega,
        relative_phase_drift_final: final_drift,
    })
}
