//! Prime field elements with a runtime modulus.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Largest modulus accepted, so that products fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) && p < MAX_MODULUS {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Fp {
        let m = modulus as i64;
        Fp { value: value.rem_euclid(m) as u64, modulus }
    }

    pub fn from_u64(value: u64, modulus: u64) -> Fp {
        Fp { value: value % modulus, modulus }
    }

    pub fn zero(modulus: u64) -> Fp {
        Fp { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Fp {
        Fp { value: 1 % modulus, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self.value;
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.modulus;
            }
            base = base * base % self.modulus;
            e >>= 1;
        }
        Fp { value: acc, modulus: self.modulus }
    }

    /// Signed power; negative exponents need an invertible base.
    pub fn powi(self, e: i64) -> Option<Fp> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|i| i.pow(e.unsigned_abs()))
        }
    }

    pub fn inv(self) -> Option<Fp> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }

    /// Image of a rational number, if its denominator is a unit mod p.
    pub fn from_rational(r: &BigRational, modulus: u64) -> Option<Fp> {
        let m = BigInt::from(modulus);
        let reduce = |x: &BigInt| -> u64 {
            let r = x % &m;
            let r = if r.is_negative() { r + &m } else { r };
            r.to_u64().unwrap_or(0)
        };
        let num = Fp::from_u64(reduce(r.numer()), modulus);
        let den = Fp::from_u64(reduce(r.denom()), modulus);
        den.inv().map(|d| num * d)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.value + o.value;
        Fp { value: if s >= self.modulus { s - self.modulus } else { s }, modulus: self.modulus }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        debug_assert_eq!(self.modulus, o.modulus);
        Fp { value: (self.value + self.modulus - o.value) % self.modulus, modulus: self.modulus }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        debug_assert_eq!(self.modulus, o.modulus);
        Fp { value: self.value * o.value % self.modulus, modulus: self.modulus }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

/// Smallest generator of the multiplicative group of F_p.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&f| Fp::from_u64(g, p).pow((p - 1) / f).value() != 1))
        .expect("a prime field has a primitive root")
}

/// All k-th roots of `a` in F_p, by exhaustion.
pub fn roots_of(a: Fp, k: u32) -> Vec<Fp> {
    let p = a.modulus();
    (0..p)
        .map(|v| Fp::from_u64(v, p))
        .filter(|r| r.pow(k as u64) == a)
        .collect()
}

/// Smallest prime `>= start` that is congruent to 1 modulo `m`.
pub fn prime_one_mod(m: u64, start: u64) -> u64 {
    let mut p = start.max(2);
    loop {
        if is_prime(p) && (p - 1).is_multiple_of(m) {
            return p;
        }
        p += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_laws_small() {
        let p = 13;
        for a in 0..p {
            let x = Fp::from_u64(a, p);
            if a != 0 {
                assert_eq!(x * x.inv().unwrap(), Fp::one(p));
            }
            assert_eq!(x + (-x), Fp::zero(p));
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(101), 2);
        assert_eq!(primitive_root(2), 1);
    }

    #[test]
    fn rational_images() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(Fp::from_rational(&half, 7).unwrap().value(), 4);
        assert!(Fp::from_rational(&half, 2).is_none());
        let neg = BigRational::from_integer((-3).into());
        assert_eq!(Fp::from_rational(&neg, 7).unwrap().value(), 4);
    }

    #[test]
    fn primes() {
        assert!(is_prime(61) && is_prime(181) && !is_prime(91));
        assert!(check_prime(1).is_err());
        assert_eq!(prime_one_mod(60, 62), 181);
    }
}
