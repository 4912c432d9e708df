//! Model definitions: parameters, state, the inertial and first-order vector
//! fields, symmetry transforms and the closed-form solutions used as oracles.
//!
//! Phases are kept unwrapped on the real line. Nothing in this module reduces
//! modulo 2π.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("system must contain at least one oscillator")]
    Empty,
    #[error("inertia must be finite and non-negative, got {0}")]
    InvalidInertia(f64),
    #[error("coupling strength must be finite and non-negative, got {0}")]
    InvalidCoupling(f64),
    #[error("natural frequency {index} is not finite")]
    NonFiniteFrequency { index: usize },
    #[error("state has {got} oscillators but the system has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state entry {index} is not finite")]
    NonFiniteState { index: usize },
    #[error("zero inertia: the inertial vector field is undefined, use the first-order field")]
    ZeroInertia,
    #[error("dilation factor must be positive and finite, got {0}")]
    InvalidDilation(f64),
    #[error("invalid permutation")]
    InvalidPermutation,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("group {group} has nonzero phase centroid (|sum| = {residual:e})")]
    NonZeroCentroid { group: usize, residual: f64 },
    #[error("group {group} does not share a single natural and initial frequency")]
    NonConstantGroup { group: usize },
}

/// Inertia `m`, coupling `kappa` and natural frequencies `nu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemParams<T> {
    m: T,
    kappa: T,
    nu: Vec<T>,
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(m: T, kappa: T, nu: Vec<T>) -> Result<Self, ModelError> {
        if nu.is_empty() {
            return Err(ModelError::Empty);
        }
        if !m.is_finite() || m < T::zero() {
            return Err(ModelError::InvalidInertia(m.to_f64().unwrap_or(f64::NAN)));
        }
        if !kappa.is_finite() || kappa < T::zero() {
            return Err(ModelError::InvalidCoupling(
                kappa.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if let Some(index) = nu.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteFrequency { index });
        }
        Ok(Self { m, kappa, nu })
    }

    /// First-order model: same parameters with the inertia set to zero.
    pub fn first_order(kappa: T, nu: Vec<T>) -> Result<Self, ModelError> {
        Self::new(T::zero(), kappa, nu)
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn nu_c(&self) -> T {
        mean(&self.nu)
    }

    /// 𝒟(𝒱): largest pairwise distance between natural frequencies.
    pub fn nu_diameter(&self) -> T {
        diameter_of(&self.nu)
    }

    pub fn nu_variance(&self) -> T {
        variance(&self.nu)
    }

    pub fn with_m(&self, m: T) -> Result<Self, ModelError> {
        Self::new(m, self.kappa, self.nu.clone())
    }

    pub fn with_kappa(&self, kappa: T) -> Result<Self, ModelError> {
        Self::new(self.m, kappa, self.nu.clone())
    }

    pub fn with_nu(&self, nu: Vec<T>) -> Result<Self, ModelError> {
        Self::new(self.m, self.kappa, nu)
    }

    /// Restriction to the given oscillators (used for sub-ensemble certificates).
    pub fn subset(&self, indices: &[usize]) -> Result<Self, ModelError> {
        let nu = indices.iter().map(|&i| self.nu[i]).collect();
        Self::new(self.m, self.kappa, nu)
    }
}

/// Time, unwrapped phases and frequencies of every oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseState<T> {
    pub t: T,
    pub theta: Vec<T>,
    pub omega: Vec<T>,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(t: T, theta: Vec<T>, omega: Vec<T>) -> Result<Self, ModelError> {
        if theta.len() != omega.len() {
            return Err(ModelError::DimensionMismatch {
                expected: theta.len(),
                got: omega.len(),
            });
        }
        let state = Self { t, theta, omega };
        state.check_finite()?;
        Ok(state)
    }

    pub fn at_rest(theta: Vec<T>) -> Result<Self, ModelError> {
        let omega = vec![T::zero(); theta.len()];
        Self::new(T::zero(), theta, omega)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn check_finite(&self) -> Result<(), ModelError> {
        if !self.t.is_finite() {
            return Err(ModelError::NonFiniteState { index: usize::MAX });
        }
        let n = self.theta.len();
        if let Some(index) = self.theta.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteState { index });
        }
        if let Some(index) = self.omega.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteState { index: n + index });
        }
        Ok(())
    }

    pub fn check_matches(&self, params: &SystemParams<T>) -> Result<(), ModelError> {
        if self.theta.len() != params.n() || self.omega.len() != params.n() {
            return Err(ModelError::DimensionMismatch {
                expected: params.n(),
                got: self.theta.len().min(self.omega.len()),
            });
        }
        Ok(())
    }

    pub fn theta_c(&self) -> T {
        mean(&self.theta)
    }

    pub fn omega_c(&self) -> T {
        mean(&self.omega)
    }
}

pub(crate) fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    xs.iter().copied().sum::<T>() / T::from_usize_lossy(xs.len())
}

/// Population variance (1/N normalisation).
pub fn variance<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let c = mean(xs);
    xs.iter().map(|&x| (x - c) * (x - c)).sum::<T>() / T::from_usize_lossy(xs.len())
}

/// max − min; zero for empty input.
pub fn diameter_of<T: Scalar>(xs: &[T]) -> T {
    let mut it = xs.iter().copied();
    let Some(first) = it.next() else {
        return T::zero();
    };
    let (lo, hi) = it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// How the all-to-all coupling sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingEval {
    /// O(N²) double loop; the reference evaluation.
    Direct,
    /// O(N) evaluation through the centroid (1/N)Σe^{iθ_j}.
    #[default]
    MeanField,
}

/// Writes (κ/N)Σ_j sin(θ_j − θ_i) into `out`.
pub fn coupling_into<T: Scalar>(kappa: T, theta: &[T], eval: CouplingEval, out: &mut [T]) {
    let n = theta.len();
    debug_assert_eq!(out.len(), n);
    if n <= 1 || kappa == T::zero() {
        out.iter_mut().for_each(|o| *o = T::zero());
        return;
    }
    let scale = kappa / T::from_usize_lossy(n);
    match eval {
        CouplingEval::Direct => {
            for (i, o) in out.iter_mut().enumerate() {
                let ti = theta[i];
                let s: T = theta.iter().map(|&tj| (tj - ti).sin()).sum();
                *o = scale * s;
            }
        }
        CouplingEval::MeanField => {
            let (mut c, mut s) = (T::zero(), T::zero());
            for &t in theta {
                let (st, ct) = t.sin_cos();
                c = c + ct;
                s = s + st;
            }
            for (o, &t) in out.iter_mut().zip(theta) {
                let (st, ct) = t.sin_cos();
                *o = scale * (s * ct - c * st);
            }
        }
    }
}

/// Right-hand side of the 2N-dimensional first-order system:
/// θ̇ = ω, ω̇ = (ν − ω + coupling)/m.
pub fn rhs_inertial<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
) -> Result<(Vec<T>, Vec<T>), ModelError> {
    rhs_inertial_with(params, state, CouplingEval::Direct)
}

pub fn rhs_inertial_with<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
    eval: CouplingEval,
) -> Result<(Vec<T>, Vec<T>), ModelError> {
    if params.m() == T::zero() {
        return Err(ModelError::ZeroInertia);
    }
    state.check_matches(params)?;
    let n = params.n();
    let mut d_omega = vec![T::zero(); n];
    inertial_accel_into(params, &state.theta, &state.omega, eval, &mut d_omega);
    Ok((state.omega.clone(), d_omega))
}

/// ω̇ only; `out` must have length N. Caller guarantees m > 0.
pub(crate) fn inertial_accel_into<T: Scalar>(
    params: &SystemParams<T>,
    theta: &[T],
    omega: &[T],
    eval: CouplingEval,
    out: &mut [T],
) {
    coupling_into(params.kappa(), theta, eval, out);
    let inv_m = T::one() / params.m();
    for ((o, &nu), &w) in out.iter_mut().zip(params.nu()).zip(omega) {
        *o = (nu - w + *o) * inv_m;
    }
}

/// θ̇_i = ν_i + (κ/N)Σ_j sin(θ_j − θ_i). The inertia is ignored.
pub fn rhs_first_order<T: Scalar>(params: &SystemParams<T>, theta: &[T]) -> Vec<T> {
    rhs_first_order_with(params, theta, CouplingEval::Direct)
}

pub fn rhs_first_order_with<T: Scalar>(
    params: &SystemParams<T>,
    theta: &[T],
    eval: CouplingEval,
) -> Vec<T> {
    let mut out = vec![T::zero(); theta.len()];
    first_order_into(params, theta, eval, &mut out);
    out
}

pub(crate) fn first_order_into<T: Scalar>(
    params: &SystemParams<T>,
    theta: &[T],
    eval: CouplingEval,
    out: &mut [T],
) {
    coupling_into(params.kappa(), theta, eval, out);
    for (o, &nu) in out.iter_mut().zip(params.nu()) {
        *o = *o + nu;
    }
}

/// 1 − e^{−t/m}, computed without cancellation.
#[inline]
pub(crate) fn one_minus_decay<T: Scalar>(t: T, m: T) -> T {
    -(-t / m).exp_m1()
}

/// t − m + m e^{−t/m}, computed without cancellation.
#[inline]
pub(crate) fn drift_time<T: Scalar>(t: T, m: T) -> T {
    t + m * (-t / m).exp_m1()
}

/// Shifts applied by the Galilean symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GalileanShift<T> {
    pub nu: T,
    pub theta: T,
    pub omega: T,
}

/// Maps a solution (and its parameters) to the Galilean-shifted solution. The
/// state is interpreted at its own time `state.t`.
pub fn galilean_transform<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
    shift: GalileanShift<T>,
) -> Result<(SystemParams<T>, PhaseState<T>), ModelError> {
    let m = params.m();
    if m == T::zero() {
        return Err(ModelError::ZeroInertia);
    }
    state.check_matches(params)?;
    let t = state.t;
    let decay = (-t / m).exp();
    let theta_off = shift.theta + m * shift.omega * one_minus_decay(t, m) + shift.nu * drift_time(t, m);
    let omega_off = shift.omega * decay + shift.nu * one_minus_decay(t, m);
    let nu = params.nu().iter().map(|&v| v - shift.nu).collect();
    let theta = state.theta.iter().map(|&x| x - theta_off).collect();
    let omega = state.omega.iter().map(|&w| w - omega_off).collect();
    Ok((
        SystemParams::new(m, params.kappa(), nu)?,
        PhaseState::new(t, theta, omega)?,
    ))
}

/// Time dilation: κ ↦ ακ, ν ↦ αν, m ↦ m/α, ω ↦ αω. A state at time t maps to
/// time t/α, since θ_α(s) = θ(αs).
pub fn dilate_transform<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
    alpha: T,
) -> Result<(SystemParams<T>, PhaseState<T>), ModelError> {
    if !alpha.is_finite() || alpha <= T::zero() {
        return Err(ModelError::InvalidDilation(
            alpha.to_f64().unwrap_or(f64::NAN),
        ));
    }
    state.check_matches(params)?;
    let nu = params.nu().iter().map(|&v| alpha * v).collect();
    let params = SystemParams::new(params.m() / alpha, alpha * params.kappa(), nu)?;
    let omega = state.omega.iter().map(|&w| alpha * w).collect();
    let state = PhaseState::new(state.t / alpha, state.theta.clone(), omega)?;
    Ok((params, state))
}

/// (ν, θ, ω) ↦ (−ν, −θ, −ω).
pub fn reflect<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
) -> Result<(SystemParams<T>, PhaseState<T>), ModelError> {
    state.check_matches(params)?;
    let neg = |xs: &[T]| xs.iter().map(|&x| -x).collect::<Vec<_>>();
    Ok((
        params.with_nu(neg(params.nu()))?,
        PhaseState::new(state.t, neg(&state.theta), neg(&state.omega))?,
    ))
}

/// Relabels oscillators: position `i` of the result takes oscillator `source[i]`.
pub fn permute<T: Scalar>(
    params: &SystemParams<T>,
    state: &PhaseState<T>,
    source: &[usize],
) -> Result<(SystemParams<T>, PhaseState<T>), ModelError> {
    state.check_matches(params)?;
    let n = params.n();
    let mut seen = vec![false; n];
    if source.len() != n {
        return Err(ModelError::InvalidPermutation);
    }
    for &s in source {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(ModelError::InvalidPermutation);
        }
    }
    let pick = |xs: &[T]| source.iter().map(|&s| xs[s]).collect::<Vec<_>>();
    Ok((
        params.with_nu(pick(params.nu()))?,
        PhaseState::new(state.t, pick(&state.theta), pick(&state.omega))?,
    ))
}

/// Closed-form evolution of the phase and frequency averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanTrajectory<T> {
    pub theta_c0: T,
    pub omega_c0: T,
    pub nu_c: T,
    pub m: T,
}

impl<T: Scalar> MeanTrajectory<T> {
    /// (θ_c(t), ω_c(t)).
    pub fn at(&self, t: T) -> (T, T) {
        let m = self.m;
        let theta = m * self.omega_c0 * one_minus_decay(t, m)
            + self.nu_c * drift_time(t, m)
            + self.theta_c0;
        let omega = self.omega_c0 * (-t / m).exp() + self.nu_c * one_minus_decay(t, m);
        (theta, omega)
    }
}

pub fn mean_closed_form<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
) -> Result<MeanTrajectory<T>, ModelError> {
    if params.m() == T::zero() {
        return Err(ModelError::ZeroInertia);
    }
    state0.check_matches(params)?;
    Ok(MeanTrajectory {
        theta_c0: state0.theta_c(),
        omega_c0: state0.omega_c(),
        nu_c: params.nu_c(),
        m: params.m(),
    })
}

/// Exact solution for data whose groups each have zero phase centroid and a
/// shared natural/initial frequency. The coupling vanishes identically, so every
/// oscillator relaxes independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution<T> {
    m: T,
    nu: Vec<T>,
    theta0: Vec<T>,
    omega0: Vec<T>,
}

impl<T: Scalar> ExactSolution<T> {
    pub fn state_at(&self, t: T) -> PhaseState<T> {
        let m = self.m;
        let relax = one_minus_decay(t, m);
        let drift = drift_time(t, m);
        let decay = (-t / m).exp();
        let theta = (0..self.nu.len())
            .map(|i| m * self.omega0[i] * relax + self.nu[i] * drift + self.theta0[i])
            .collect();
        let omega = (0..self.nu.len())
            .map(|i| self.omega0[i] * decay + self.nu[i] * relax)
            .collect();
        PhaseState { t, theta, omega }
    }

    pub fn initial_state(&self) -> PhaseState<T> {
        PhaseState {
            t: T::zero(),
            theta: self.theta0.clone(),
            omega: self.omega0.clone(),
        }
    }
}

/// Validates the group structure and returns the exact trajectory.
pub fn nonsync_exact<T: Scalar>(
    params: &SystemParams<T>,
    state0: &PhaseState<T>,
    groups: &[Vec<usize>],
) -> Result<ExactSolution<T>, ModelError> {
    if params.m() == T::zero() {
        return Err(ModelError::ZeroInertia);
    }
    state0.check_matches(params)?;
    let n = params.n();
    let mut owner = vec![None; n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(ModelError::InvalidPartition(format!("group {g} is empty")));
        }
        for &i in members {
            if i >= n {
                return Err(ModelError::InvalidPartition(format!("index {i} out of range")));
            }
            if owner[i].replace(g).is_some() {
                return Err(ModelError::InvalidPartition(format!("index {i} listed twice")));
            }
        }
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return Err(ModelError::InvalidPartition(format!("index {i} not covered")));
    }
    for (g, members) in groups.iter().enumerate() {
        let (c, s) = members.iter().fold((T::zero(), T::zero()), |(c, s), &i| {
            let (si, ci) = state0.theta[i].sin_cos();
            (c + ci, s + si)
        });
        let residual = c.hypot(s);
        let tol = T::lit(1e-12).max(T::lit(8.0) * T::epsilon() * T::from_usize_lossy(members.len()));
        if residual > tol {
            return Err(ModelError::NonZeroCentroid {
                group: g,
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        let first = members[0];
        let constant = members.iter().all(|&i| {
            params.nu()[i] == params.nu()[first] && state0.omega[i] == state0.omega[first]
        });
        if !constant {
            return Err(ModelError::NonConstantGroup { group: g });
        }
    }
    Ok(ExactSolution {
        m: params.m(),
        nu: params.nu().to_vec(),
        theta0: state0.theta.clone(),
        omega0: state0.omega.clone(),
    })
}
