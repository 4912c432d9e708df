//! Fixed-step classic RK4 for the inertial and first-order systems, plus
//! collision detection with bisection refinement inside a step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    first_order_into, inertial_accel_into, CouplingEval, ModelError, PhaseState, SystemParams,
};
use crate::scalar::{wrap_pi, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("non-finite state at t = {t} (step {step}); dt is too large or the input is corrupt")]
    NonFinite { t: f64, step: usize },
}

/// Step size, horizon and observer cadence.
///
/// `t_end` is an absolute time: integration runs from `state0.t` to `t_end`,
/// with the final step shortened when `t_end − t0` is not a multiple of `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub observer_stride: usize,
    pub refine_tol: T,
    pub coupling: CouplingEval,
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            observer_stride: 1,
            refine_tol: T::lit(1e-12),
            coupling: CouplingEval::default(),
        }
    }

    /// dt = 0.01, the usual protocol step.
    pub fn standard(t_end: T) -> Self {
        Self::new(T::lit(0.01), t_end)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.observer_stride = stride;
        self
    }

    pub fn with_coupling(mut self, coupling: CouplingEval) -> Self {
        self.coupling = coupling;
        self
    }

    /// High-accuracy variant: dt/20, with the stride scaled so that snapshots
    /// land on the same times as the base configuration.
    pub fn reference(&self) -> Self {
        Self {
            dt: self.dt / T::lit(20.0),
            observer_stride: self.observer_stride.saturating_mul(20),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(IntegratorError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= T::zero()) {
            return Err(IntegratorError::InvalidConfig(format!(
                "t_end must be finite and non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.refine_tol.is_finite() && self.refine_tol > T::zero()) {
            return Err(IntegratorError::InvalidConfig(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        if self.observer_stride == 0 {
            return Err(IntegratorError::InvalidConfig("observer_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end` from `t0`.
    pub fn steps_from(&self, t0: T) -> usize {
        let span = self.t_end - t0;
        if span <= T::zero() {
            return 0;
        }
        // absorb rounding in span/dt so that e.g. 30/0.01 gives 3000, not 3001
        let r = span / self.dt - T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        r.ceil().to_usize().unwrap_or(usize::MAX).max(1)
    }

    fn time_at(&self, t0: T, k: usize, n: usize) -> T {
        if k >= n {
            self.t_end
        } else {
            t0 + T::from_usize_lossy(k) * self.dt
        }
    }
}

struct Rk4Work<T> {
    k_th: [Vec<T>; 4],
    k_om: [Vec<T>; 4],
    th: Vec<T>,
    om: Vec<T>,
}

impl<T: Scalar> Rk4Work<T> {
    fn new(n: usize) -> Self {
        let z = || vec![T::zero(); n];
        Self {
            k_th: [z(), z(), z(), z()],
            k_om: [z(), z(), z(), z()],
            th: z(),
            om: z(),
        }
    }
}

/// One classic RK4 step of length `h` for the inertial system, from
/// (theta, omega) into (out_theta, out_omega).
#[allow(clippy::too_many_arguments)]
fn rk4_inertial_step<T: Scalar>(
    params: &SystemParams<T>,
    eval: CouplingEval,
    theta: &[T],
    omega: &[T],
    h: T,
    w: &mut Rk4Work<T>,
    out_theta: &mut [T],
    out_omega: &mut [T],
) {
    let n = theta.len();
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);

    w.k_th[0].copy_from_slice(omega);
    inertial_accel_into(params, theta, omega, eval, &mut w.k_om[0]);
    for stage in 1..4 {
        let c = if stage == 3 { h } else { half };
        for i in 0..n {
            w.th[i] = theta[i] + c * w.k_th[stage - 1][i];
            w.om[i] = omega[i] + c * w.k_om[stage - 1][i];
        }
        w.k_th[stage].copy_from_slice(&w.om);
        let (th, om) = (&w.th, &w.om);
        inertial_accel_into(params, th, om, eval, &mut w.k_om[stage]);
    }
    for i in 0..n {
        out_theta[i] = theta[i]
            + sixth * (w.k_th[0][i] + two * w.k_th[1][i] + two * w.k_th[2][i] + w.k_th[3][i]);
        out_omega[i] = omega[i]
            + sixth * (w.k_om[0][i] + two * w.k_om[1][i] + two * w.k_om[2][i] + w.k_om[3][i]);
    }
}

fn rk4_first_order_step<T: Scalar>(
    params: &SystemParams<T>,
    eval: CouplingEval,
    theta: &[T],
    h: T,
    w: &mut Rk4Work<T>,
    out: &mut [T],
) {
    let n = theta.len();
    let half = h / T::lit(2.0);
    let two = T::lit(2.0);
    first_order_into(params, theta, eval, &mut w.k_th[0]);
    for stage in 1..4 {
        let c = if stage == 3 { h } else { half };
        for i in 0..n {
            w.th[i] = theta[i] + c * w.k_th[stage - 1][i];
        }
        first_order_into(params, &w.th, eval, &mut w.k_th[stage]);
    }
    let sixth = h / T::lit(6.0);
    for i in 0..n {
        out[i] = theta[i]
            + sixth * (w.k_th[0][i] + two * w.k_th[1][i] + two * w.k_th[2][i] + w.k_th[3][i]);
    }
}

fn all_finite<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

fn check_inertial_inputs<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
) -> Result<(), IntegratorError> {
    config.validate()?;
    if params.m() == T::zero() {
        return Err(ModelError::ZeroInertia.into());
    }
    state0.check_matches(params)?;
    state0.check_finite()?;
    Ok(())
}

/// Drives the inertial integration, handing every (previous, current) step pair
/// to `on_step`. Returns the final state.
fn drive_inertial<T, F>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
    mut on_step: F,
) -> Result<PhaseState<T>, IntegratorError>
where
    T: Scalar,
    F: FnMut(usize, &PhaseState<T>, &PhaseState<T>, &mut Rk4Work<T>),
{
    check_inertial_inputs(params, state0, config)?;
    let n = params.n();
    let t0 = state0.t;
    let steps = config.steps_from(t0);
    let mut work = Rk4Work::new(n);
    let mut prev = state0.clone();
    let mut cur = state0.clone();
    for k in 1..=steps {
        let t_prev = prev.t;
        let t_next = config.time_at(t0, k, steps);
        rk4_inertial_step(
            params,
            config.coupling,
            &prev.theta,
            &prev.omega,
            t_next - t_prev,
            &mut work,
            &mut cur.theta,
            &mut cur.omega,
        );
        cur.t = t_next;
        if !(all_finite(&cur.theta) && all_finite(&cur.omega)) {
            log::error!("integration blew up at t = {}", t_next);
            return Err(IntegratorError::NonFinite {
                t: t_next.to_f64().unwrap_or(f64::NAN),
                step: k,
            });
        }
        on_step(k, &prev, &cur, &mut work);
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev)
}

fn wants_snapshot(k: usize, steps: usize, stride: usize) -> bool {
    k.is_multiple_of(stride) || k == steps
}

/// Integrates the inertial system. The observer sees the initial state, every
/// `observer_stride`-th step and the final state.
pub fn integrate<T, O>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
    mut observer: O,
) -> Result<PhaseState<T>, IntegratorError>
where
    T: Scalar,
    O: FnMut(&PhaseState<T>),
{
    check_inertial_inputs(params, state0, config)?;
    let steps = config.steps_from(state0.t);
    let stride = config.observer_stride;
    observer(state0);
    drive_inertial(params, state0, config, |k, _, cur, _| {
        if wants_snapshot(k, steps, stride) {
            observer(cur);
        }
    })
}

/// Convenience wrapper collecting every observed snapshot.
pub fn integrate_recorded<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
) -> Result<Vec<PhaseState<T>>, IntegratorError> {
    let mut out = Vec::new();
    integrate(params, state0, config, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Integrates the first-order system from t = 0. The observer receives
/// `(t, theta)` on the same schedule as [`integrate`].
pub fn integrate_first_order<T, O>(
    params: &SystemParams<T>,
    theta0: &[T],
    config: &IntegratorConfig<T>,
    mut observer: O,
) -> Result<Vec<T>, IntegratorError>
where
    T: Scalar,
    O: FnMut(T, &[T]),
{
    config.validate()?;
    if theta0.len() != params.n() {
        return Err(ModelError::DimensionMismatch {
            expected: params.n(),
            got: theta0.len(),
        }
        .into());
    }
    if let Some(index) = theta0.iter().position(|x| !x.is_finite()) {
        return Err(ModelError::NonFiniteState { index }.into());
    }
    let t0 = T::zero();
    let steps = config.steps_from(t0);
    let mut work = Rk4Work::new(theta0.len());
    let mut prev = theta0.to_vec();
    let mut cur = theta0.to_vec();
    observer(t0, &prev);
    for k in 1..=steps {
        let t_prev = config.time_at(t0, k - 1, steps);
        let t_next = config.time_at(t0, k, steps);
        rk4_first_order_step(params, config.coupling, &prev, t_next - t_prev, &mut work, &mut cur);
        if !all_finite(&cur) {
            return Err(IntegratorError::NonFinite {
                t: t_next.to_f64().unwrap_or(f64::NAN),
                step: k,
            });
        }
        if wants_snapshot(k, steps, config.observer_stride) {
            observer(t_next, &cur);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev)
}

/// A refined crossing θ_i − θ_j = 2πk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent<T> {
    pub i: usize,
    pub j: usize,
    pub t_star: T,
    pub branch: i64,
}

/// Pairs that coincide as oscillators (same ν, same ω⁰, same θ⁰ mod 2π) never
/// separate and are not collisions.
pub fn indistinguishable<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    i: usize,
    j: usize,
) -> bool {
    let (ti, tj) = (state0.theta[i], state0.theta[j]);
    let tol = T::epsilon() * T::lit(16.0) * (T::one() + ti.abs() + tj.abs());
    params.nu()[i] == params.nu()[j]
        && state0.omega[i] == state0.omega[j]
        && wrap_pi(ti - tj).abs() <= tol
}

/// sin(θ_i/2)cos(θ_j/2) − cos(θ_i/2)sin(θ_j/2) = sin((θ_i − θ_j)/2) for all
/// pairs, using O(N) trig evaluations.
struct HalfAngles<T> {
    s: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> HalfAngles<T> {
    fn new(n: usize) -> Self {
        Self {
            s: vec![T::zero(); n],
            c: vec![T::zero(); n],
        }
    }

    fn load(&mut self, theta: &[T]) {
        let half = T::lit(0.5);
        for ((s, c), &t) in self.s.iter_mut().zip(self.c.iter_mut()).zip(theta) {
            let (a, b) = (t * half).sin_cos();
            *s = a;
            *c = b;
        }
    }

    #[inline]
    fn gap(&self, i: usize, j: usize) -> T {
        self.s[i] * self.c[j] - self.c[i] * self.s[j]
    }
}

#[inline]
fn crosses<T: Scalar>(before: T, after: T) -> bool {
    (before < T::zero() && after >= T::zero()) || (before > T::zero() && after <= T::zero())
}

/// Incremental collision detector fed with consecutive integrator steps.
struct CollisionScanner<T> {
    pairs: Vec<(usize, usize)>,
    prev: HalfAngles<T>,
    cur: HalfAngles<T>,
    tmp_theta: Vec<T>,
    tmp_omega: Vec<T>,
    events: Vec<CollisionEvent<T>>,
}

impl<T: Scalar> CollisionScanner<T> {
    fn new(params: &SystemParams<T>, state0: &PhaseState<T>) -> Self {
        let n = params.n();
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !indistinguishable(params, state0, i, j))
            .collect();
        let mut prev = HalfAngles::new(n);
        prev.load(&state0.theta);
        Self {
            pairs,
            prev,
            cur: HalfAngles::new(n),
            tmp_theta: vec![T::zero(); n],
            tmp_omega: vec![T::zero(); n],
            events: Vec::new(),
        }
    }

    fn step(
        &mut self,
        params: &SystemParams<T>,
        config: &IntegratorConfig<T>,
        prev: &PhaseState<T>,
        cur: &PhaseState<T>,
        work: &mut Rk4Work<T>,
    ) {
        self.cur.load(&cur.theta);
        let h = cur.t - prev.t;
        for idx in 0..self.pairs.len() {
            let (i, j) = self.pairs[idx];
            let g0 = self.prev.gap(i, j);
            let g1 = self.cur.gap(i, j);
            if !crosses(g0, g1) {
                continue;
            }
            let event = if g1 == T::zero() {
                CollisionEvent {
                    i,
                    j,
                    t_star: cur.t,
                    branch: branch_of(cur.theta[i] - cur.theta[j]),
                }
            } else {
                self.refine(params, config, prev, h, i, j, g0, work)
            };
            self.events.push(event);
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
    }

    /// Bisection over the sub-step length τ ∈ [0, h], each probe being a fresh
    /// RK4 step of length τ from the bracketing state.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        params: &SystemParams<T>,
        config: &IntegratorConfig<T>,
        prev: &PhaseState<T>,
        h: T,
        i: usize,
        j: usize,
        g0: T,
        work: &mut Rk4Work<T>,
    ) -> CollisionEvent<T> {
        let half = T::lit(0.5);
        let (mut lo, mut hi) = (T::zero(), h);
        let mut diff = prev.theta[i] - prev.theta[j];
        for _ in 0..200 {
            if hi - lo <= config.refine_tol {
                break;
            }
            let mid = (lo + hi) * half;
            if mid <= lo || mid >= hi {
                break;
            }
            rk4_inertial_step(
                params,
                config.coupling,
                &prev.theta,
                &prev.omega,
                mid,
                work,
                &mut self.tmp_theta,
                &mut self.tmp_omega,
            );
            diff = self.tmp_theta[i] - self.tmp_theta[j];
            let g = (diff * half).sin();
            if g == T::zero() {
                lo = mid;
                hi = mid;
                break;
            }
            if (g > T::zero()) == (g0 > T::zero()) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = (lo + hi) * half;
        rk4_inertial_step(
            params,
            config.coupling,
            &prev.theta,
            &prev.omega,
            tau,
            work,
            &mut self.tmp_theta,
            &mut self.tmp_omega,
        );
        if tau > T::zero() {
            diff = self.tmp_theta[i] - self.tmp_theta[j];
        }
        CollisionEvent {
            i,
            j,
            t_star: prev.t + tau,
            branch: branch_of(diff),
        }
    }
}

fn branch_of<T: Scalar>(diff: T) -> i64 {
    (diff / T::two_pi()).round().to_i64().unwrap_or(0)
}

/// Integrates the inertial system and returns every refined collision event,
/// sorted by time, together with the final state. The observer behaves as in
/// [`integrate`].
pub fn detect_collisions_observed<T, O>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
    mut observer: O,
) -> Result<(Vec<CollisionEvent<T>>, PhaseState<T>), IntegratorError>
where
    T: Scalar,
    O: FnMut(&PhaseState<T>),
{
    check_inertial_inputs(params, state0, config)?;
    let steps = config.steps_from(state0.t);
    let stride = config.observer_stride;
    let mut scanner = CollisionScanner::new(params, state0);
    observer(state0);
    let last = drive_inertial(params, state0, config, |k, prev, cur, work| {
        scanner.step(params, config, prev, cur, work);
        if wants_snapshot(k, steps, stride) {
            observer(cur);
        }
    })?;
    let mut events = scanner.events;
    events.sort_by(|a, b| {
        a.t_star
            .partial_cmp(&b.t_star)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.i, a.j).cmp(&(b.i, b.j)))
    });
    Ok((events, last))
}

pub fn detect_collisions<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    config: &IntegratorConfig<T>,
) -> Result<Vec<CollisionEvent<T>>, IntegratorError> {
    detect_collisions_observed(params, state0, config, |_| {}).map(|(events, _)| events)
}
