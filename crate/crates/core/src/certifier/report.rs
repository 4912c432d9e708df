use serde::Serialize;

use super::partial::PartialPredictions;
use crate::scalar::Scalar;

/// Rounding allowance for non-strict inequalities. Some parameter selections
/// meet a non-strict condition with equality by construction.
pub const NON_STRICT_ALLOWANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    SimpleThm,
    FrameworkF,
    PartialLock,
    Corollary,
    N3,
    FirstOrder,
}

/// Free parameters of the sufficient framework.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeParams<T> {
    pub eta: T,
    pub delta: T,
    pub lambda: T,
    pub ell: T,
}

/// One inequality `value < bound` (strict) or `value ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition<T> {
    pub name: String,
    pub value: T,
    pub bound: T,
    /// bound − value.
    pub margin: T,
    pub strict: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl<T: Scalar> Condition<T> {
    pub fn strict(name: impl Into<String>, value: T, bound: T) -> Self {
        let margin = bound - value;
        Self {
            name: name.into(),
            value,
            bound,
            margin,
            strict: true,
            pass: margin > T::zero(),
            detail: None,
        }
    }

    pub fn non_strict(name: impl Into<String>, value: T, bound: T) -> Self {
        let margin = bound - value;
        let scale = T::one().max(bound.abs()).max(value.abs());
        Self {
            name: name.into(),
            value,
            bound,
            margin,
            strict: false,
            pass: margin >= -T::lit(NON_STRICT_ALLOWANCE) * scale,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Intermediate quantities worth reporting; absent when not computed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CertQuantities<T> {
    pub zeta_eta: Option<T>,
    pub xi_eta: Option<T>,
    pub xi_inf: Option<T>,
    pub f_ell: Option<T>,
    pub theta_star: Option<T>,
    pub phi1: Option<T>,
    pub phi2: Option<T>,
    /// Minimum of the reduced (x, y, z) objective over η.
    pub xyz_objective: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport<T> {
    pub which_theorem: Theorem,
    pub pass: bool,
    pub per_condition: Vec<Condition<T>>,
    pub free_params: Option<FreeParams<T>>,
    pub quantities: CertQuantities<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions: Option<PartialPredictions<T>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl<T: Scalar> CertificateReport<T> {
    pub fn new(which_theorem: Theorem, per_condition: Vec<Condition<T>>) -> Self {
        let pass = !per_condition.is_empty() && per_condition.iter().all(|c| c.pass);
        Self {
            which_theorem,
            pass,
            per_condition,
            free_params: None,
            quantities: CertQuantities::default(),
            predictions: None,
            notes: Vec::new(),
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition<T>> {
        self.per_condition.iter().find(|c| c.name == name)
    }

    /// Recomputes `pass` from the conditions.
    pub(crate) fn refresh(&mut self) {
        self.pass = !self.per_condition.is_empty() && self.per_condition.iter().all(|c| c.pass);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictness() {
        assert!(!Condition::strict("a", 1.0, 1.0).pass);
        assert!(Condition::non_strict("a", 1.0, 1.0).pass);
        assert!(Condition::non_strict("a", 1.0 + 1e-15, 1.0).pass);
        assert!(!Condition::non_strict("a", 1.0 + 1e-9, 1.0).pass);
        assert!(!CertificateReport::<f64>::new(Theorem::N3, vec![]).pass);
    }
}
