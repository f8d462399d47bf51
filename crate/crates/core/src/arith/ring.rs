use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::fp::Fp;
use crate::error::{Error, Result};

/// Minimal commutative ring interface used by the matrix layer.
///
/// `zero_like`/`one_like` exist because some carriers (prime fields,
/// polynomial rings) need context that a bare `Zero::zero()` lacks.
pub trait Ring: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn inverse(&self) -> Result<Self>;

    fn from_i64_like(&self, k: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        for _ in 0..k.unsigned_abs() {
            acc = acc.plus(&one);
        }
        if k < 0 {
            acc.negate()
        } else {
            acc
        }
    }
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
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
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn from_i64_like(&self, k: i64) -> Self {
        BigRational::from_integer(k.into())
    }
}

impl Ring for Fp {
    fn zero_like(&self) -> Self {
        Fp::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        Fp::one(self.modulus())
    }
    fn plus(&self, o: &Self) -> Self {
        *self + *o
    }
    fn minus(&self, o: &Self) -> Self {
        *self - *o
    }
    fn times(&self, o: &Self) -> Self {
        *self * *o
    }
    fn negate(&self) -> Self {
        -*self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inverse(&self) -> Result<Self> {
        self.inv().ok_or(Error::DivisionByZero)
    }
    fn from_i64_like(&self, k: i64) -> Self {
        Fp::new(k, self.modulus())
    }
}
