//! Checks of the a priori estimates against recorded trajectories. Every
//! routine returns a slack (bound minus observed value); negative slack means
//! the estimate is violated.

use serde::Serialize;

use super::order::order_state;
use crate::model::{diameter_of, one_minus_decay, PhaseState, SystemParams};
use crate::scalar::Scalar;

/// Interval e^{−t/m}ω_i⁰ + (1 − e^{−t/m})(ν_i ± κ) containing ω_i(t).
pub fn frequency_envelope<T: Scalar>(params: &SystemParams<T>, omega0: &[T], t: T) -> Vec<(T, T)> {
    let (m, kappa) = (params.m(), params.kappa());
    let decay = (-t / m).exp();
    let relax = one_minus_decay(t, m);
    omega0
        .iter()
        .zip(params.nu())
        .map(|(&w0, &nu)| {
            (
                decay * w0 + relax * (nu - kappa),
                decay * w0 + relax * (nu + kappa),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationSlack<T> {
    /// Individual frequency envelopes.
    pub individual: T,
    /// Pairwise frequency differences.
    pub pairwise: T,
    /// Frequency diameter.
    pub diameter: T,
}

impl<T: Scalar> PropagationSlack<T> {
    pub fn min(&self) -> T {
        self.individual.min(self.pairwise).min(self.diameter)
    }
}

/// Minimum slack of the three frequency propagation estimates at `snapshot`,
/// with time measured from `state0.t`.
pub fn propagation_slack<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    snapshot: &PhaseState<T>,
) -> PropagationSlack<T> {
    let t = snapshot.t - state0.t;
    let (m, kappa) = (params.m(), params.kappa());
    let decay = (-t / m).exp();
    let relax = one_minus_decay(t, m);
    let two_kappa = kappa + kappa;

    let individual = frequency_envelope(params, &state0.omega, t)
        .iter()
        .zip(&snapshot.omega)
        .map(|(&(lo, hi), &w)| (w - lo).min(hi - w))
        .fold(T::infinity(), T::min);

    let (nu, w0, w) = (params.nu(), &state0.omega, &snapshot.omega);
    let n = nu.len();
    let mut pairwise = T::infinity();
    for i in 0..n {
        for j in i + 1..n {
            let bound = decay * (w0[i] - w0[j]).abs() + relax * ((nu[i] - nu[j]).abs() + two_kappa);
            pairwise = pairwise.min(bound - (w[i] - w[j]).abs());
        }
    }
    if n < 2 {
        pairwise = T::zero();
    }

    let diameter = decay * diameter_of(w0) + relax * (params.nu_diameter() + two_kappa) - diameter_of(w);
    PropagationSlack {
        individual,
        pairwise,
        diameter,
    }
}

/// Slack of Ṙ ≥ κ√Δ(1 − e^{−t/m})(R√Δ − ξ) at interior snapshots with
/// t − t₀ ≥ ηm, Ṙ by centered differences. Returns `(t, slack)` pairs.
pub fn quasi_monotonicity_slack<T: Scalar>(
    params: &SystemParams<T>,
    snapshots: &[PhaseState<T>],
    xi: T,
    eta: T,
) -> Vec<(T, T)> {
    if snapshots.len() < 3 {
        return Vec::new();
    }
    let t0 = snapshots[0].t;
    let (m, kappa) = (params.m(), params.kappa());
    let orders: Vec<_> = snapshots.iter().map(|s| order_state(&s.theta)).collect();
    (1..snapshots.len() - 1)
        .filter(|&k| snapshots[k].t - t0 >= eta * m)
        .map(|k| {
            let dr = (orders[k + 1].r - orders[k - 1].r) / (snapshots[k + 1].t - snapshots[k - 1].t);
            let o = &orders[k];
            let sd = o.delta.sqrt();
            let rhs = kappa * sd * one_minus_decay(snapshots[k].t - t0, m) * (o.r * sd - xi);
            (snapshots[k].t, dr - rhs)
        })
        .collect()
}

/// min over snapshots with t − t₀ ≤ ηm of R(t) − (R⁰ − ζ).
pub fn initial_layer_slack<T: Scalar>(snapshots: &[PhaseState<T>], zeta: T, eta: T, m: T) -> T {
    let Some(first) = snapshots.first() else {
        return T::infinity();
    };
    let floor = order_state(&first.theta).r - zeta;
    snapshots
        .iter()
        .take_while(|s| s.t - first.t <= eta * m)
        .map(|s| order_state(&s.theta).r - floor)
        .fold(T::infinity(), T::min)
}
