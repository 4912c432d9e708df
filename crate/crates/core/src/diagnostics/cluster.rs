use serde::Serialize;

use super::order::OrderState;
use crate::certifier::arrangement_constant;
use crate::model::{PhaseState, SystemParams};
use crate::scalar::{rem_two_pi, wrap_pi, Scalar};

/// Oscillators confined to a short arc once each is shifted by 2πk_i.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport<T> {
    /// Ascending oscillator indices.
    pub indices: Vec<usize>,
    /// k_i for each entry of `indices`: θ_i − 2πk_i lies on the arc.
    pub translations: Vec<i64>,
    pub arc_diameter: T,
    pub fraction: T,
}

impl<T: Scalar> ClusterReport<T> {
    /// The translated phases θ_i − 2πk_i, in `indices` order.
    pub fn translated(&self, theta: &[T]) -> Vec<T> {
        self.indices
            .iter()
            .zip(&self.translations)
            .map(|(&i, &k)| theta[i] - T::two_pi() * T::from_i64(k).unwrap_or_else(T::zero))
            .collect()
    }
}

pub(crate) fn required_count(lambda: f64, n: usize) -> usize {
    // tolerate λN landing a hair above an integer through rounding
    ((lambda * n as f64) - 1e-9).ceil().max(1.0) as usize
}

fn translation_of<T: Scalar>(theta: T, placed: T) -> i64 {
    ((theta - placed) / T::two_pi()).round().to_i64().unwrap_or(0)
}

/// Largest set of oscillators fitting, modulo 2π, in an arc of length `ell`.
/// Returns `None` unless it holds at least ⌈λN⌉ members. Ties prefer the
/// smaller arc, then the window starting earliest in sorted residue order.
pub fn find_majority_cluster<T: Scalar>(theta: &[T], lambda: T, ell: T) -> Option<ClusterReport<T>> {
    let n = theta.len();
    if n == 0
        || !(lambda > T::zero() && lambda <= T::one())
        || !(ell > T::zero() && ell < T::two_pi())
    {
        return None;
    }
    let mut order: Vec<(T, usize)> = theta.iter().map(|&t| rem_two_pi(t)).zip(0..n).collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let value = |pos: usize| {
        let (r, _) = order[pos % n];
        if pos >= n {
            r + T::two_pi()
        } else {
            r
        }
    };

    // (count, arc, start)
    let mut best: Option<(usize, T, usize)> = None;
    let mut end = 0usize;
    for start in 0..n {
        end = end.max(start);
        while end + 1 < start + n && value(end + 1) - value(start) <= ell {
            end += 1;
        }
        let count = end - start + 1;
        let arc = value(end) - value(start);
        let better = match best {
            None => true,
            Some((bc, ba, _)) => count > bc || (count == bc && arc < ba),
        };
        if better {
            best = Some((count, arc, start));
        }
    }
    let (count, _, start) = best?;
    if count < required_count(lambda.to_f64()?, n) {
        return None;
    }

    let mut placed: Vec<(usize, T)> = (start..start + count).map(|pos| (order[pos % n].1, value(pos))).collect();
    let (lo, hi) = (placed[0].1, placed[count - 1].1);
    if (lo + hi) / T::lit(2.0) >= T::PI() {
        placed.iter_mut().for_each(|p| p.1 = p.1 - T::two_pi());
    }
    placed.sort_by_key(|p| p.0);
    let translations = placed.iter().map(|&(i, x)| translation_of(theta[i], x)).collect();
    let indices: Vec<usize> = placed.iter().map(|p| p.0).collect();
    let report = ClusterReport {
        indices,
        translations,
        arc_diameter: T::zero(),
        fraction: T::from_usize_lossy(count) / T::from_usize_lossy(n),
    };
    let tr = report.translated(theta);
    let arc = crate::model::diameter_of(&tr);
    Some(ClusterReport {
        arc_diameter: arc,
        ..report
    })
}

/// Which sufficient condition admitted a condensation cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CondensationGate {
    /// R ≥ λ + (1 − λ)cos β.
    Amplitude,
    /// 2λ + Δ/(1 − cos β) ≤ 1 + R.
    Deviation,
}

/// When R and Δ force it, the oscillators within β of the mean phase form a
/// cluster of at least ⌈λN⌉ members on an arc shorter than 2β.
pub fn cluster_from_condensation<T: Scalar>(
    order: &OrderState<T>,
    theta: &[T],
    lambda: T,
    beta: T,
) -> Option<(ClusterReport<T>, CondensationGate)> {
    let phi = order.phi?;
    if !(beta > T::zero() && beta < T::FRAC_PI_2()) || theta.is_empty() {
        return None;
    }
    let (r, cb) = (order.r, beta.cos());
    let gate = if r >= lambda + (T::one() - lambda) * cb {
        CondensationGate::Amplitude
    } else if T::lit(2.0) * lambda + order.delta / (T::one() - cb) <= T::one() + r {
        CondensationGate::Deviation
    } else {
        return None;
    };
    let mut indices = Vec::new();
    let mut translations = Vec::new();
    for (i, &t) in theta.iter().enumerate() {
        if wrap_pi(t - phi).abs() < beta {
            indices.push(i);
            translations.push(((t - phi) / T::two_pi()).round().to_i64().unwrap_or(0));
        }
    }
    let n = theta.len();
    let count = indices.len();
    if count < required_count(lambda.to_f64()?, n) {
        log::warn!("condensation gate held but only {count} of {n} oscillators lie within β of φ");
    }
    let mut report = ClusterReport {
        indices,
        translations,
        arc_diameter: T::zero(),
        fraction: T::from_usize_lossy(count) / T::from_usize_lossy(n),
    };
    report.arc_diameter = crate::model::diameter_of(&report.translated(theta));
    Some((report, gate))
}

/// Phase gap of one ordered pair (ν_i ≥ ν_j) over the tail against its
/// admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGap<T> {
    pub i: usize,
    pub j: usize,
    pub gap_min: T,
    pub gap_mean: T,
    pub gap_max: T,
    pub lower: T,
    pub upper: T,
    /// gap_min − lower and upper − gap_max; negative means violated.
    pub slack_lower: T,
    pub slack_upper: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementReport<T> {
    pub constant: T,
    pub pairs: Vec<PairGap<T>>,
    /// Smallest slack over all pairs (positive when every gap is inside).
    pub min_slack: T,
}

impl<T: Scalar> ArrangementReport<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.min_slack >= -tol
    }
}

/// For each pair in `subset` with ν_i ≥ ν_j, compares the range of
/// θ_i − θ_j over `tail` (a proxy for liminf/limsup) with [(ν_i − ν_j)/κ, c(ν_i − ν_j)/κ], where c is the
/// arrangement constant for (φ₁, λ). Gaps are reduced to (−π, π], which is
/// faithful for a cluster on an arc shorter than π.
pub fn arrangement_check<T: Scalar>(
    tail: &[PhaseState<T>],
    params: &SystemParams<T>,
    subset: &[usize],
    phi1: T,
    lambda: T,
) -> ArrangementReport<T> {
    let c = arrangement_constant(phi1, lambda);
    let kappa = params.kappa();
    let nu = params.nu();
    let count = T::from_usize_lossy(tail.len().max(1));
    let mut pairs = Vec::new();
    let mut min_slack = T::infinity();
    for (a, &p) in subset.iter().enumerate() {
        for &q in &subset[a + 1..] {
            let (i, j) = if nu[p] >= nu[q] { (p, q) } else { (q, p) };
            let (mut lo, mut hi, mut sum) = (T::infinity(), T::neg_infinity(), T::zero());
            for s in tail {
                let g = wrap_pi(s.theta[i] - s.theta[j]);
                lo = lo.min(g);
                hi = hi.max(g);
                sum = sum + g;
            }
            if tail.is_empty() {
                (lo, hi) = (T::zero(), T::zero());
            }
            let base = (nu[i] - nu[j]) / kappa;
            let (lower, upper) = (base, c * base);
            let entry = PairGap {
                i,
                j,
                gap_min: lo,
                gap_mean: sum / count,
                gap_max: hi,
                lower,
                upper,
                slack_lower: lo - lower,
                slack_upper: upper - hi,
            };
            min_slack = min_slack.min(entry.slack_lower).min(entry.slack_upper);
            pairs.push(entry);
        }
    }
    ArrangementReport {
        constant: c,
        pairs,
        min_slack,
    }
}
