use serde::Serialize;

use super::CertifierError;
use crate::diagnostics::order_state;
use crate::model::{diameter_of, PhaseState, SystemParams};
use crate::scalar::Scalar;

/// The handful of numbers every certificate depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceSummary<T> {
    pub m: T,
    pub kappa: T,
    pub d_v: T,
    pub d_omega0: T,
    pub r0: T,
}

impl<T: Scalar> InstanceSummary<T> {
    pub fn from_state(params: &SystemParams<T>, state0: &PhaseState<T>) -> Self {
        Self {
            m: params.m(),
            kappa: params.kappa(),
            d_v: params.nu_diameter(),
            d_omega0: diameter_of(&state0.omega),
            r0: order_state(&state0.theta).r,
        }
    }

    /// (mκ, 𝒟(𝒱)/κ, 𝒟(Ω⁰)/κ): invariant under time dilation.
    pub fn dimensionless(&self) -> (T, T, T) {
        (self.m * self.kappa, self.d_v / self.kappa, self.d_omega0 / self.kappa)
    }
}

/// 1 − e^{−η}.
fn relax<T: Scalar>(eta: T) -> T {
    -(-eta).exp_m1()
}

/// e^{−η}/(1 − e^{−η}) = 1/(e^η − 1).
fn tail_ratio<T: Scalar>(eta: T) -> T {
    if eta.is_infinite() {
        T::zero()
    } else {
        T::one() / eta.exp_m1()
    }
}

fn check_eta<T: Scalar>(eta: T) -> Result<(), CertifierError> {
    if eta > T::zero() {
        Ok(())
    } else {
        Err(super::invalid("eta", eta, "must be positive"))
    }
}

/// ζ(η): bound on the loss of R during the initial layer [0, ηm].
pub fn zeta<T: Scalar>(params: &SystemParams<T>, d_omega0: T, eta: T) -> Result<T, CertifierError> {
    check_eta(eta)?;
    Ok(zeta_raw(params.m(), params.kappa(), params.nu_diameter(), d_omega0, eta))
}

pub(crate) fn zeta_raw<T: Scalar>(m: T, kappa: T, d_v: T, d_omega0: T, eta: T) -> T {
    let r = relax(eta);
    let half = T::lit(0.5);
    let first = m * r * half * (d_omega0 + d_v * eta);
    let second = m * m * kappa * r.powi(3) * (T::lit(0.75) * d_omega0 + (d_v + kappa + kappa) * eta);
    first + second
}

/// ξ(η): worst-case anti-synchronizing forcing after the initial layer.
pub fn xi<T: Scalar>(params: &SystemParams<T>, d_omega0: T, eta: T) -> Result<T, CertifierError> {
    check_eta(eta)?;
    if params.kappa() <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    Ok(xi_raw(params.m(), params.kappa(), params.nu_diameter(), d_omega0, eta))
}

pub(crate) fn xi_raw<T: Scalar>(m: T, kappa: T, d_v: T, d_omega0: T, eta: T) -> T {
    let two_kappa = kappa + kappa;
    let big = eta.max(T::one());
    let layer = if big.is_infinite() { T::zero() } else { big * (-big).exp() };
    (d_v + two_kappa) * m + d_omega0 * m * layer + d_v / two_kappa + d_omega0 / two_kappa * tail_ratio(eta)
}

/// ξ(∞) = m𝒟(𝒱) + 2mκ + 𝒟(𝒱)/(2κ).
pub fn xi_inf<T: Scalar>(params: &SystemParams<T>) -> Result<T, CertifierError> {
    if params.kappa() <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    Ok(xi_inf_raw(params.m(), params.kappa(), params.nu_diameter()))
}

pub(crate) fn xi_inf_raw<T: Scalar>(m: T, kappa: T, d_v: T) -> T {
    m * d_v + T::lit(2.0) * m * kappa + d_v / (kappa + kappa)
}
