use serde::Serialize;

use super::DiagnosticsError;
use crate::model::{diameter_of, PhaseState};
use crate::scalar::Scalar;

/// Below this amplitude the mean phase φ is treated as undefined.
pub const PHI_UNDEFINED_BELOW: f64 = 1e-12;

const FALLBACK_GRID: usize = 64;

/// Amplitude R, mean phase φ and mean-square deviation Δ of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderState<T> {
    pub r: T,
    pub phi: Option<T>,
    pub delta: T,
    /// Δ came from the grid minimum because φ is undefined.
    pub delta_fallback: bool,
}

pub(crate) fn centroid<T: Scalar>(theta: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(theta.len().max(1));
    let (c, s) = theta.iter().fold((T::zero(), T::zero()), |(c, s), &t| {
        let (st, ct) = t.sin_cos();
        (c + ct, s + st)
    });
    (c / n, s / n)
}

pub(crate) fn mean_sin2<T: Scalar>(theta: &[T], phi: T) -> T {
    let n = T::from_usize_lossy(theta.len().max(1));
    theta.iter().map(|&t| (t - phi).sin().powi(2)).sum::<T>() / n
}

pub fn order_state<T: Scalar>(theta: &[T]) -> OrderState<T> {
    let (c, s) = centroid(theta);
    let r = c.hypot(s).min(T::one());
    if r >= T::lit(PHI_UNDEFINED_BELOW) {
        let phi = s.atan2(c);
        OrderState {
            r,
            phi: Some(phi),
            delta: mean_sin2(theta, phi),
            delta_fallback: false,
        }
    } else {
        let step = T::two_pi() / T::from_usize_lossy(FALLBACK_GRID);
        let delta = (0..FALLBACK_GRID)
            .map(|k| mean_sin2(theta, step * T::from_usize_lossy(k)))
            .fold(T::infinity(), T::min);
        OrderState {
            r,
            phi: None,
            delta,
            delta_fallback: true,
        }
    }
}

/// (1/N²)ΣΣcos(θ_j − θ_i), an O(N²) route to R².
pub fn pairwise_r_squared<T: Scalar>(theta: &[T]) -> T {
    let n = T::from_usize_lossy(theta.len().max(1));
    let mut acc = T::zero();
    for &ti in theta {
        for &tj in theta {
            acc = acc + (tj - ti).cos();
        }
    }
    acc / (n * n)
}

fn check_subset(subset: &[usize], n: usize) -> Result<(), DiagnosticsError> {
    if subset.is_empty() {
        return Err(DiagnosticsError::EmptySubset);
    }
    if let Some(&index) = subset.iter().find(|&&i| i >= n) {
        return Err(DiagnosticsError::IndexOutOfRange { index, n });
    }
    Ok(())
}

pub fn subset_diameter<T: Scalar>(xs: &[T], subset: Option<&[usize]>) -> Result<T, DiagnosticsError> {
    match subset {
        None if xs.is_empty() => Err(DiagnosticsError::EmptySubset),
        None => Ok(diameter_of(xs)),
        Some(idx) => {
            check_subset(idx, xs.len())?;
            let picked: Vec<T> = idx.iter().map(|&i| xs[i]).collect();
            Ok(diameter_of(&picked))
        }
    }
}

/// (𝒟(Θ), 𝒟(Ω)) over all oscillators or over `subset`, on unwrapped phases.
pub fn diameters<T: Scalar>(
    state: &PhaseState<T>,
    subset: Option<&[usize]>,
) -> Result<(T, T), DiagnosticsError> {
    Ok((
        subset_diameter(&state.theta, subset)?,
        subset_diameter(&state.omega, subset)?,
    ))
}

/// Lifts a sequence of mean phases to a continuous branch. The first defined
/// value is kept as is; undefined values leave the branch untouched.
#[derive(Debug, Clone, Default)]
pub struct PhaseUnwrapper<T> {
    last: Option<T>,
}

impl<T: Scalar> PhaseUnwrapper<T> {
    pub fn new() -> Self {
        Self { last: None }
    }

    pub fn push(&mut self, phi: Option<T>) -> Option<T> {
        let phi = phi?;
        let lifted = match self.last {
            None => phi,
            Some(prev) => {
                let k = ((prev - phi) / T::two_pi()).round();
                phi + k * T::two_pi()
            }
        };
        self.last = Some(lifted);
        Some(lifted)
    }
}
