//! Scalar abstraction shared by every numeric routine in the crate.

use core::fmt::{Debug, Display};
use core::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the model is evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every supported scalar can represent it (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Reduces `x` into `[0, 2π)`.
#[inline]
pub fn rem_two_pi<T: Scalar>(x: T) -> T {
    let tau = T::two_pi();
    let r = x % tau;
    let r = if r < T::zero() { r + tau } else { r };
    // x % tau can round to exactly tau after the shift
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Reduces `x` into `(-π, π]`.
#[inline]
pub fn wrap_pi<T: Scalar>(x: T) -> T {
    let r = rem_two_pi(x);
    if r > T::PI() {
        r - T::two_pi()
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reductions() {
        let tau = std::f64::consts::TAU;
        assert_eq!(rem_two_pi(0.0_f64), 0.0);
        assert!((rem_two_pi(-0.5_f64) - (tau - 0.5)).abs() < 1e-15);
        assert!((rem_two_pi(3.0 * tau + 0.25) - 0.25).abs() < 1e-12);
        assert!((wrap_pi(tau - 0.1_f64) + 0.1).abs() < 1e-15);
        assert_eq!(wrap_pi(std::f64::consts::PI), std::f64::consts::PI);
        assert!((rem_two_pi(-1e-20_f64)) < tau);
    }
}
