//! Exact integer coefficients for fraction-free pivoting.
//!
//! Machine integers report overflow through `None`; the solver then restarts
//! with arbitrary precision.

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Coeff: Clone + core::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn sign(&self) -> i8;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    /// Quotient of an exact division.
    fn div_exact(&self, o: &Self) -> Option<Self>;
    /// Floor division and non-negative remainder for a positive divisor.
    fn divmod(&self, o: &Self) -> Option<(Self, Self)>;
    fn cmp_value(&self, o: &Self) -> Ordering;
    fn to_i64(&self) -> Option<i64>;

    fn is_nil(&self) -> bool {
        self.sign() == 0
    }

    /// `a*b - c*d`.
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.mul(b)?.sub(&c.mul(d)?)
    }
}

impl Coeff for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    #[inline]
    fn sign(&self) -> i8 {
        i128::signum(*self) as i8
    }
    #[inline]
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    #[inline]
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    #[inline]
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    #[inline]
    fn div_exact(&self, o: &Self) -> Option<Self> {
        debug_assert!(*o != 0 && self % o == 0, "inexact division {self} / {o}");
        // 64-bit division is far cheaper than the 128-bit routine
        if let (Ok(a), Ok(b)) = (i64::try_from(*self), i64::try_from(*o)) {
            if let Some(q) = a.checked_div(b) {
                return Some(q as i128);
            }
        }
        self.checked_div(*o)
    }
    fn divmod(&self, o: &Self) -> Option<(Self, Self)> {
        Some((self.checked_div_euclid(*o)?, self.checked_rem_euclid(*o)?))
    }
    fn cmp_value(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
    #[inline]
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn sign(&self) -> i8 {
        if Zero::is_zero(self) {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        debug_assert!((self % o).is_nil(), "inexact division");
        Some(self / o)
    }
    fn divmod(&self, o: &Self) -> Option<(Self, Self)> {
        Some(Integer::div_mod_floor(self, o))
    }
    fn cmp_value(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn to_i64(&self) -> Option<i64> {
        ToPrimitive::to_i64(self)
    }
}
