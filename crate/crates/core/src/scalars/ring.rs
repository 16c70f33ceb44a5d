use super::Scalar;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Minimal commutative ring interface used by the generic q-series kernels.
pub trait Ring: Clone + Debug {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn from_scalar(s: &Scalar) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `None` when not invertible.
    fn inverse(&self) -> Option<Self>;

    fn powi(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::ring_one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.times(&base);
        }
        Some(acc)
    }
}

impl Ring for Scalar {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn powi(&self, e: i64) -> Option<Self> {
        if e < 0 && self.is_zero() {
            None
        } else {
            Some(super::pow(self, e))
        }
    }
}
