use rug::{Float, Rational};

use super::{EpsSeries, Scalar};

/// The arithmetic shared by exact rationals, floats, scalars and truncated
/// series, so step maps and recursions are written once.
///
/// `inv` returns `None` exactly when the value cannot be inverted in its
/// representation (zero, or a series whose leading terms all cancelled).
pub trait Field: Clone + std::fmt::Debug {
    /// A zero with the same precision/shape as `self`.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, r: &Rational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    fn from_int_like(&self, v: i64) -> Self {
        self.from_rational_like(&Rational::from(v))
    }

    fn square(&self) -> Self {
        self.mul(self)
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0 {
            None
        } else {
            Some(Rational::from(self.recip_ref()))
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

impl Field for Float {
    fn zero_like(&self) -> Self {
        Float::with_val(self.prec(), 0)
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        Float::with_val(self.prec(), r)
    }
    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self * other)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() || !self.is_finite() {
            None
        } else {
            Some(Float::with_val(self.prec(), self.recip_ref()))
        }
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
}

impl Field for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero_like(self)
    }
    fn one_like(&self) -> Self {
        Scalar::one_like(self)
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        Scalar::Exact(r.clone()).add(&Scalar::zero_like(self))
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Scalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        Scalar::one_like(self).checked_div(self).ok()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Field for EpsSeries {
    fn zero_like(&self) -> Self {
        EpsSeries::zero(self.terms())
    }
    fn one_like(&self) -> Self {
        EpsSeries::constant(&Rational::from(1), self.terms())
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        EpsSeries::constant(r, self.terms())
    }
    fn add(&self, other: &Self) -> Self {
        EpsSeries::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        EpsSeries::add(self, &EpsSeries::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        EpsSeries::mul(self, other)
    }
    fn neg(&self) -> Self {
        EpsSeries::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        EpsSeries::inv(self)
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
}
