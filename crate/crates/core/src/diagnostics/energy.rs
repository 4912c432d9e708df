use super::order::{centroid, order_state};
use super::DiagnosticsError;
use crate::model::{variance, PhaseState, SystemParams};
use crate::scalar::Scalar;

/// P(Θ) = −Σν_kθ_k + (κ/2)ΣΣ(1 − cos(θ_k − θ_l)), by the direct double sum.
pub fn potential<T: Scalar>(params: &SystemParams<T>, theta: &[T]) -> T {
    let linear: T = params.nu().iter().zip(theta).map(|(&v, &t)| v * t).sum();
    let mut pair = T::zero();
    for &tk in theta {
        for &tl in theta {
            pair = pair + (T::one() - (tk - tl).cos());
        }
    }
    -linear + params.kappa() * pair / T::lit(2.0)
}

/// Same potential through the order parameter: −Σνθ + (κN²/2)(1 − R²).
pub fn potential_via_order<T: Scalar>(params: &SystemParams<T>, theta: &[T]) -> T {
    let linear: T = params.nu().iter().zip(theta).map(|(&v, &t)| v * t).sum();
    let (c, s) = centroid(theta);
    let n = T::from_usize_lossy(theta.len());
    -linear + params.kappa() * n * n * (T::one() - (c * c + s * s)) / T::lit(2.0)
}

/// −∂P/∂θ_i = ν_i + κΣ_j sin(θ_j − θ_i). Note the absent 1/N: the vector field
/// equals this gradient divided by N.
pub fn potential_gradient<T: Scalar>(params: &SystemParams<T>, theta: &[T]) -> Vec<T> {
    theta
        .iter()
        .zip(params.nu())
        .map(|(&ti, &nu)| {
            let s: T = theta.iter().map(|&tj| (tj - ti).sin()).sum();
            nu + params.kappa() * s
        })
        .collect()
}

/// E = κ(1 − R²)/2 + (m/2)Var(Ω).
pub fn energy<T: Scalar>(params: &SystemParams<T>, state: &PhaseState<T>) -> T {
    let r = order_state(&state.theta).r;
    let half = T::lit(0.5);
    params.kappa() * (T::one() - r * r) * half + params.m() * half * variance(&state.omega)
}

/// r(t) = dE/dt + Var(Ω) with dE/dt by centered differences; returned as
/// `(t, r)` for every interior snapshot. Requires identical natural frequencies
/// and equally spaced snapshots.
pub fn energy_dissipation_residual<T: Scalar>(
    params: &SystemParams<T>,
    snapshots: &[PhaseState<T>],
) -> Result<Vec<(T, T)>, DiagnosticsError> {
    let spread = params.nu_diameter();
    if spread > T::lit(1e-12) {
        return Err(DiagnosticsError::NonIdenticalFrequencies {
            spread: spread.to_f64().unwrap_or(f64::NAN),
        });
    }
    if snapshots.len() < 3 {
        return Err(DiagnosticsError::TooFewSnapshots {
            needed: 3,
            got: snapshots.len(),
        });
    }
    let h = snapshots[1].t - snapshots[0].t;
    let tol = h * T::lit(1e-6);
    if snapshots.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > tol) {
        return Err(DiagnosticsError::NonUniformSpacing);
    }
    let e: Vec<T> = snapshots.iter().map(|s| energy(params, s)).collect();
    let two_h = h + h;
    Ok((1..snapshots.len() - 1)
        .map(|k| {
            let de = (e[k + 1] - e[k - 1]) / two_h;
            (snapshots[k].t, de + variance(&snapshots[k].omega))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn potential_examples() {
        let p = SystemParams::new(1.0, 1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(potential(&p, &[0.4, 0.4]), 0.0);
        assert!((potential(&p, &[0.0, PI]) - 2.0).abs() < 1e-15);
        assert!((potential_via_order(&p, &[0.0, PI]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_residual_vanishes() {
        let p = SystemParams::new(0.5, 1.0, vec![0.3; 4]).unwrap();
        let snaps: Vec<_> = (0..5)
            .map(|k| {
                let t = 0.1 * k as f64;
                PhaseState::new(t, vec![0.3 * t; 4], vec![0.3; 4]).unwrap()
            })
            .collect();
        for (_, r) in energy_dissipation_residual(&p, &snaps).unwrap() {
            assert!(r.abs() < 1e-14);
        }
    }

    #[test]
    fn residual_preconditions() {
        let p = SystemParams::new(0.5, 1.0, vec![0.0, 0.1]).unwrap();
        let s = PhaseState::at_rest(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            energy_dissipation_residual(&p, &[s.clone(), s.clone(), s.clone()]),
            Err(DiagnosticsError::NonIdenticalFrequencies { .. })
        ));
        let p = SystemParams::new(0.5, 1.0, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            energy_dissipation_residual(&p, &[s.clone(), s]),
            Err(DiagnosticsError::TooFewSnapshots { .. })
        ));
    }
}
