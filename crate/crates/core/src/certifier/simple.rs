//! The dimensionless (x, y, z) criterion and the explicit choice of free
//! parameters that reduces it to the framework conditions.

use serde::Serialize;

use super::arc::f_estimate_ii;
use super::framework::{check_framework, validate_lambda_ell};
use super::report::{CertificateReport, Condition, FreeParams, Theorem};
use super::CertifierError;
use crate::model::SystemParams;
use crate::scalar::Scalar;

/// ξ̃ is compared against this multiple of δ².
pub const DEFAULT_XYZ_DIVISOR: f64 = 0.3259;
/// Rounded reciprocal of [`DEFAULT_XYZ_DIVISOR`] sometimes quoted instead.
pub const XYZ_MULTIPLIER_ALIAS: f64 = 3.068;

const BREAKPOINT: f64 = 0.94;
const GRID_POINTS: usize = 200;
const ETA_MIN: f64 = 1e-3;
const ETA_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimpleOptions<T> {
    pub divisor: T,
}

impl<T: Scalar> Default for SimpleOptions<T> {
    fn default() -> Self {
        Self {
            divisor: T::lit(DEFAULT_XYZ_DIVISOR),
        }
    }
}

/// Maps a user-supplied multiplier of ξ̃ to the divisor actually used.
/// 1/0.3259 is accepted as is; the rounded 3.068 is accepted as an alias with
/// a warning (the returned string); anything else is rejected.
pub fn resolve_xyz_constant(multiplier: f64) -> Result<(f64, Option<String>), CertifierError> {
    let exact = 1.0 / DEFAULT_XYZ_DIVISOR;
    if (multiplier - exact).abs() < 1e-9 {
        Ok((DEFAULT_XYZ_DIVISOR, None))
    } else if (multiplier - XYZ_MULTIPLIER_ALIAS).abs() < 1e-12 {
        let msg = format!(
            "constant {XYZ_MULTIPLIER_ALIAS} is treated as an alias of 1/{DEFAULT_XYZ_DIVISOR} = {exact:.6}"
        );
        log::warn!("{msg}");
        Ok((DEFAULT_XYZ_DIVISOR, Some(msg)))
    } else {
        Err(CertifierError::InvalidParameter {
            name: "xyz_constant",
            value: multiplier,
            reason: format!("only 1/{DEFAULT_XYZ_DIVISOR} (or its alias {XYZ_MULTIPLIER_ALIAS}) is supported"),
        })
    }
}

/// ζ̃(η) = ((1−e^{−η})/2)(yz + ηxy) + (1−e^{−η})³y²(¾z + ηx + 2η).
pub fn reduced_zeta<T: Scalar>(x: T, y: T, z: T, eta: T) -> T {
    let r = -(-eta).exp_m1();
    r / T::lit(2.0) * (y * z + eta * x * y) + r.powi(3) * y * y * (T::lit(0.75) * z + eta * x + T::lit(2.0) * eta)
}

/// ξ̃(η) = y(x+2) + M e^{−M} yz + x/2 + (e^{−η}/(1−e^{−η}))·z/2, M = max(1, η).
pub fn reduced_xi<T: Scalar>(x: T, y: T, z: T, eta: T) -> T {
    let big = eta.max(T::one());
    let half = T::lit(0.5);
    y * (x + T::lit(2.0)) + big * (-big).exp() * y * z + x * half + z * half / eta.exp_m1()
}

pub fn simple_objective<T: Scalar>(x: T, y: T, z: T, eta: T, divisor: T) -> T {
    reduced_zeta(x, y, z, eta) + (reduced_xi(x, y, z, eta) / divisor).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XyzMinimum<T> {
    pub eta: T,
    pub value: T,
}

/// Log-spaced grid over [1e−3, 50], then golden-section refinement inside the
/// bracket around the best grid point.
pub(crate) fn minimize_objective<T: Scalar>(x: T, y: T, z: T, divisor: T) -> XyzMinimum<T> {
    let g = |eta: T| simple_objective(x, y, z, eta, divisor);
    let (lo, hi) = (ETA_MIN.ln(), ETA_MAX.ln());
    let grid: Vec<T> = (0..GRID_POINTS)
        .map(|k| T::lit((lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64).exp()))
        .collect();
    let (mut best_k, mut best) = (0, T::infinity());
    for (k, &eta) in grid.iter().enumerate() {
        let v = g(eta);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let mut a = grid[best_k.saturating_sub(1)];
    let mut b = grid[(best_k + 1).min(GRID_POINTS - 1)];
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..100 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let (eta, value) = if gc < gd { (c, gc) } else { (d, gd) };
    if value < best {
        XyzMinimum { eta, value }
    } else {
        XyzMinimum {
            eta: grid[best_k],
            value: best,
        }
    }
}

/// λ and ℓ as functions of δR⁰, piecewise with the breakpoint at 0.94.
pub fn piecewise_selection<T: Scalar>(dr: T) -> (T, T) {
    let two = T::lit(2.0);
    if dr <= T::lit(BREAKPOINT) {
        (
            T::lit(0.5) + T::lit(35.0 / 94.0) * dr,
            two * (T::one() - T::lit(20.0 / 47.0) * dr).acos(),
        )
    } else {
        (T::lit(2.5) * dr - T::lit(1.5), two * T::lit(0.6).acos())
    }
}

pub fn check_simple<T: Scalar>(
    params: &SystemParams<T>,
    r0: T,
    d_omega0: T,
) -> Result<CertificateReport<T>, CertifierError> {
    check_simple_with(params, r0, d_omega0, &SimpleOptions::default())
}

/// Computes (x, y, z) from the instance, minimizes the reduced objective over
/// η and, when it is below 1, derives (δ, λ, ℓ) and evaluates the framework
/// with the true ζ and ξ.
///
/// δ splits the slack 1 − g evenly: δ = 1 − ζ̃ − (1 − g)/2, so that both
/// ζ̃ ≤ 1 − δ and ξ̃ ≤ 0.3259δ² hold strictly.
pub fn check_simple_with<T: Scalar>(
    params: &SystemParams<T>,
    r0: T,
    d_omega0: T,
    opts: &SimpleOptions<T>,
) -> Result<CertificateReport<T>, CertifierError> {
    let kappa = params.kappa();
    if kappa <= T::zero() {
        return Err(CertifierError::ZeroCoupling);
    }
    if !(r0 > T::zero()) {
        let mut rep = CertificateReport::new(
            Theorem::SimpleThm,
            vec![Condition::strict("F1.R0", T::zero(), r0).with_detail("R0 > 0")],
        );
        rep.notes.push("initial order parameter vanishes; nothing to certify".into());
        return Ok(rep);
    }
    let r2 = r0 * r0;
    let x = params.nu_diameter() / (kappa * r2);
    let y = params.m() * kappa / r2;
    let z = d_omega0 / (kappa * r2);
    let min = minimize_objective(x, y, z, opts.divisor);
    let xyz = Condition::strict("xyz", min.value, T::one())
        .with_detail(format!("inf over eta of the reduced objective (attained near eta = {})", min.eta));
    if !xyz.pass {
        let mut rep = CertificateReport::new(Theorem::SimpleThm, vec![xyz]);
        rep.quantities.xyz_objective = Some(min.value);
        return Ok(rep);
    }

    let eta = min.eta;
    let zt = reduced_zeta(x, y, z, eta);
    let delta = T::one() - zt - (T::one() - min.value) / T::lit(2.0);
    let (lambda, ell) = piecewise_selection(delta * r0);
    let free = FreeParams { eta, delta, lambda, ell };
    if let Err(e) = validate_lambda_ell(lambda, ell) {
        let mut rep = CertificateReport::new(Theorem::SimpleThm, vec![xyz]);
        rep.pass = false;
        rep.free_params = Some(free);
        rep.notes.push(format!("selected free parameters are out of range: {e}"));
        return Ok(rep);
    }
    let fw = check_framework(params, r0, d_omega0, &free)?;
    let mut conditions = vec![xyz];
    conditions.extend(fw.per_condition);
    let mut rep = CertificateReport::new(Theorem::SimpleThm, conditions);
    rep.free_params = Some(free);
    rep.quantities = fw.quantities;
    rep.quantities.xyz_objective = Some(min.value);
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionBoundsReport {
    pub grid_points: usize,
    /// Minimum over the grid of each left-hand side divided by (δR⁰)².
    /// The first statement only applies below the breakpoint.
    pub min_ratio: [f64; 3],
    pub argmin: [f64; 3],
    pub required: [f64; 3],
    pub slack: [f64; 3],
    /// Largest |δR⁰ − (λ + (1−λ)cos(ℓ/2))| above the breakpoint.
    pub high_branch_identity_error: f64,
    /// (λ, cos(ℓ/2), λ + (1−λ)cos(ℓ/2)) from each branch at the breakpoint.
    pub breakpoint_low: [f64; 3],
    pub breakpoint_high: [f64; 3],
    pub pass: bool,
}

/// Checks the three inequalities behind the parameter selection on the grid
/// δR⁰ = k/points, k = 1..=points.
pub fn selection_bounds_suite(points: usize) -> SelectionBoundsReport {
    let required = [0.3296, DEFAULT_XYZ_DIVISOR, 0.729];
    let mut min_ratio = [f64::INFINITY; 3];
    let mut argmin = [f64::NAN; 3];
    let mut high_err = 0.0f64;
    for k in 1..=points.max(1) {
        let d = k as f64 / points.max(1) as f64;
        let (lambda, ell): (f64, f64) = piecewise_selection(d);
        let ch = (ell / 2.0).cos();
        let sh = (ell / 2.0).sin();
        let d2 = d * d;
        let mut record = |idx: usize, value: f64| {
            if value < min_ratio[idx] {
                min_ratio[idx] = value;
                argmin[idx] = d;
            }
        };
        if d <= BREAKPOINT {
            record(0, d * (1.0 - ch).sqrt() * (1.0 + d - 2.0 * lambda).max(0.0).sqrt() / d2);
        } else {
            high_err = high_err.max((d - (lambda + (1.0 - lambda) * ch)).abs());
        }
        record(1, sh * (lambda * ch - (1.0 - lambda)) / d2);
        record(2, f_estimate_ii(lambda) / d2);
    }
    let branch = |lambda: f64, c: f64| [lambda, c, lambda + (1.0 - lambda) * c];
    let (ll, el) = (0.5 + 35.0 / 94.0 * BREAKPOINT, 1.0 - 20.0 / 47.0 * BREAKPOINT);
    let (lh, eh) = (2.5 * BREAKPOINT - 1.5, 0.6);
    let slack = [
        min_ratio[0] - required[0],
        min_ratio[1] - required[1],
        min_ratio[2] - required[2],
    ];
    let breakpoint_low = branch(ll, el);
    let breakpoint_high = branch(lh, eh);
    let continuous = breakpoint_low
        .iter()
        .zip(&breakpoint_high)
        .all(|(a, b)| (a - b).abs() < 1e-12);
    SelectionBoundsReport {
        grid_points: points,
        min_ratio,
        argmin,
        required,
        slack,
        high_branch_identity_error: high_err,
        breakpoint_low,
        breakpoint_high,
        pass: slack.iter().all(|&s| s > 0.0) && high_err < 1e-12 && continuous,
    }
}
