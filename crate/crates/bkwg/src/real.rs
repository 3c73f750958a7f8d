//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Converts a count into this type.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// `ln(1 - e^x)` for `x <= 0`, accurate across the whole range.
pub fn log1mexp<T: Real>(x: T) -> T {
    if x > T::zero() {
        return T::nan();
    }
    if x > -T::LN_2() {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^x + e^y)` without overflow.
pub fn logaddexp<T: Real>(x: T, y: T) -> T {
    if x == T::neg_infinity() {
        return y;
    }
    if y == T::neg_infinity() {
        return x;
    }
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// `(e^x - 1) / x`, equal to 1 at 0.
pub fn exprel<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-8) {
        T::one() + x * T::lit(0.5)
    } else {
        x.exp_m1() / x
    }
}

/// `c * l` with the convention `0 * (+-inf) = 0`.
#[inline]
pub fn mul_log<T: Real>(c: T, l: T) -> T {
    if c == T::zero() {
        T::zero()
    } else {
        c * l
    }
}

/// Machine epsilon of `T` as `T`.
#[inline]
pub fn eps<T: Real>() -> T {
    T::epsilon()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1mexp_both_branches() {
        for &x in &[-1e-12, -1e-5, -0.3, -0.7, -2.0, -40.0] {
            let direct = (1.0 - f64::exp(x)).ln();
            let got = log1mexp(x);
            if x < -1e-3 {
                assert!((got - direct).abs() < 1e-12, "{x}: {got} vs {direct}");
            }
        }
        assert!((log1mexp(-1e-12f64) - (1e-12f64).ln()).abs() < 1e-9);
        assert!(log1mexp(0.0f64) == f64::NEG_INFINITY);
    }

    #[test]
    fn exprel_near_zero() {
        assert_eq!(exprel(0.0f64), 1.0);
        assert!((exprel(1e-3f64) - (1e-3f64).exp_m1() / 1e-3).abs() < 1e-15);
        assert!((exprel(-1e-10f64) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn logaddexp_matches_direct() {
        let v: f64 = logaddexp(1.5, -0.5);
        assert!((v - (1.5f64.exp() + (-0.5f64).exp()).ln()).abs() < 1e-14);
        assert_eq!(logaddexp(f64::NEG_INFINITY, 2.0), 2.0);
    }
}
