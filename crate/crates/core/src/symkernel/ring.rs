use std::fmt::Debug;

use num::traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};

/// How a coefficient prints inside a sum of terms.
pub struct CoeffDisplay {
    pub negative: bool,
    /// Absolute value (or the whole value when `negative` is false and the
    /// coefficient has no meaningful sign).
    pub body: String,
    pub is_unit: bool,
    /// False when the body is a sum and needs parentheses before a monomial.
    pub atomic: bool,
}

/// Exact coefficient ring used by the polynomial types.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn is_ring_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn display_parts(&self) -> CoeffDisplay;

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    fn is_ring_one(&self) -> bool {
        *self == Self::ring_one()
    }
}

impl Coeff for Rational {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn display_parts(&self) -> CoeffDisplay {
        let a = self.abs();
        CoeffDisplay {
            negative: self.is_negative(),
            is_unit: One::is_one(&a),
            body: format_rational(&a),
            atomic: true,
        }
    }
}
