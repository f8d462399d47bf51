//! Rational functions with factored denominators.
//!
//! The numerator is kept expanded; the denominator is a multiset of
//! primitive polynomials (see [`LaurentPoly::split_content`]). Monomial
//! denominators are absorbed into negative Laurent exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::fp::Fp;
use super::poly::{LaurentPoly, Registry};
use super::radical::Tower;
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct LaurentFraction {
    num: LaurentPoly,
    den: BTreeMap<LaurentPoly, u32>,
    tower: Option<Arc<Tower>>,
}

impl LaurentFraction {
    pub fn from_poly(num: LaurentPoly, tower: Option<Arc<Tower>>) -> Self {
        let mut f = LaurentFraction { num, den: BTreeMap::new(), tower };
        f.num = f.reduce_num(&f.num);
        f
    }

    pub fn zero(reg: &Arc<Registry>, tower: Option<Arc<Tower>>) -> Self {
        Self::from_poly(LaurentPoly::zero(reg), tower)
    }

    pub fn one(reg: &Arc<Registry>, tower: Option<Arc<Tower>>) -> Self {
        Self::from_poly(LaurentPoly::one(reg), tower)
    }

    pub fn constant(reg: &Arc<Registry>, c: BigRational, tower: Option<Arc<Tower>>) -> Self {
        Self::from_poly(LaurentPoly::constant(reg, c), tower)
    }

    /// `num / den` for an arbitrary nonzero polynomial denominator.
    pub fn ratio(num: LaurentPoly, den: &LaurentPoly, tower: Option<Arc<Tower>>) -> Result<Self> {
        let d = Self::from_poly(den.clone(), tower.clone());
        Ok(Self::from_poly(num, tower).mul(&d.inv()?))
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.num.registry()
    }

    pub fn tower(&self) -> Option<&Arc<Tower>> {
        self.tower.as_ref()
    }

    pub fn with_tower(mut self, tower: Option<Arc<Tower>>) -> Self {
        self.tower = tower;
        self.num = self.reduce_num(&self.num);
        self
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &BTreeMap<LaurentPoly, u32> {
        &self.den
    }

    pub fn denominator(&self) -> LaurentPoly {
        let mut d = LaurentPoly::one(self.num.registry());
        for (f, &e) in &self.den {
            d = d.mul(&f.pow(e));
        }
        d
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    fn reduce_num(&self, p: &LaurentPoly) -> LaurentPoly {
        match &self.tower {
            Some(t) if !t.is_empty() => t.reduce(p),
            _ => p.clone(),
        }
    }

    fn pick_tower(&self, other: &Self) -> Option<Arc<Tower>> {
        self.tower.clone().or_else(|| other.tower.clone())
    }

    fn tidy(mut self) -> Self {
        self.num = self.reduce_num(&self.num);
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let factors: Vec<LaurentPoly> = self.den.keys().cloned().collect();
        for f in factors {
            let mut e = self.den[&f];
            while e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e == 0 {
                self.den.remove(&f);
            } else {
                self.den.insert(f, e);
            }
        }
        self
    }

    /// Zero test after radical reduction.
    pub fn is_zero(&self) -> bool {
        match &self.tower {
            Some(t) if !t.is_empty() => t.is_zero(&self.num),
            _ => self.num.is_zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            let slot = den.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |me: &Self| {
            let mut n = me.num.clone();
            for (f, &e) in &den {
                let have = me.den.get(f).copied().unwrap_or(0);
                if e > have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            n
        };
        let num = lift(self).add(&lift(other));
        LaurentFraction { num, den, tower: self.pick_tower(other) }.tidy()
    }

    pub fn neg(&self) -> Self {
        LaurentFraction { num: self.num.neg(), den: self.den.clone(), tower: self.tower.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero(self.num.registry(), self.pick_tower(other));
        }
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        LaurentFraction { num: self.num.mul(&other.num), den, tower: self.pick_tower(other) }.tidy()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.num.registry(), self.tower.clone());
        }
        LaurentFraction { num: self.num.scale(k), den: self.den.clone(), tower: self.tower.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (c, mono, prim) = self.num.split_content();
        let neg: Vec<i32> = mono.iter().map(|x| -x).collect();
        let mut num = LaurentPoly::monomial(self.num.registry(), neg, c.recip());
        for (f, &e) in &self.den {
            num = num.mul(&f.pow(e));
        }
        let mut den = BTreeMap::new();
        if !prim.is_one() {
            den.insert(prim, 1);
        }
        Ok(LaurentFraction { num, den, tower: self.tower.clone() }.tidy())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = Self::one(self.num.registry(), self.tower.clone());
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Equality of values, decided after radical reduction.
    pub fn value_eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn eval_mod_p(&self, point: &[Fp], p: u64) -> Result<Fp> {
        let n = self.num.eval_mod_p(point, p)?;
        let d = self.denominator().eval_mod_p(point, p)?;
        d.inv().map(|i| n * i).ok_or(Error::DivisionByZero)
    }

    pub fn lift(&self, reg: &Arc<Registry>, tower: Option<Arc<Tower>>) -> Result<Self> {
        let mut den = BTreeMap::new();
        for (f, &e) in &self.den {
            den.insert(f.lift(reg)?, e);
        }
        Ok(LaurentFraction { num: self.num.lift(reg)?, den, tower }.tidy())
    }

    /// Apply a map to numerator and each denominator factor; the map must
    /// send primitive polynomials to primitive polynomials up to units.
    pub fn map_polys(&self, f: &dyn Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        let mut out = LaurentFraction::from_poly(f(&self.num), self.tower.clone());
        for (g, &e) in &self.den {
            let mut d = LaurentFraction::from_poly(f(g), self.tower.clone());
            d = d.pow(e as i32).expect("positive power");
            out = out.div(&d).expect("denominator factor stays nonzero");
        }
        out
    }

    pub fn render(&self, power: &dyn Fn(usize, i32) -> String) -> String {
        let n = self.num.render(power);
        if self.den.is_empty() {
            return n;
        }
        let dens: Vec<String> = self
            .den
            .iter()
            .map(|(f, &e)| {
                let s = format!("({})", f.render(power));
                if e == 1 {
                    s
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        format!("{n}/({})", dens.join("*"))
    }
}

impl PartialEq for LaurentFraction {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl fmt::Display for LaurentFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reg = self.num.registry().clone();
        let power = super::poly::plain_power(&reg);
        let s = self.render(&power);
        f.write_str(&s)
    }
}

impl fmt::Debug for LaurentFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentFraction({self})")
    }
}

impl Ring for LaurentFraction {
    fn zero_like(&self) -> Self {
        Self::zero(self.num.registry(), self.tower.clone())
    }
    fn one_like(&self) -> Self {
        Self::one(self.num.registry(), self.tower.clone())
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inverse(&self) -> Result<Self> {
        self.inv()
    }
    fn from_i64_like(&self, k: i64) -> Self {
        Self::constant(self.num.registry(), BigRational::from_integer(k.into()), self.tower.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::radical::RadicalRelation;

    fn setup() -> (Arc<Registry>, LaurentFraction, LaurentFraction) {
        let reg = Registry::new(["x", "y"]).unwrap();
        let x = LaurentFraction::from_poly(LaurentPoly::var(&reg, 0), None);
        let y = LaurentFraction::from_poly(LaurentPoly::var(&reg, 1), None);
        (reg, x, y)
    }

    #[test]
    fn field_operations_cancel() {
        let (reg, x, y) = setup();
        let one = LaurentFraction::one(&reg, None);
        let a = one.div(&x.add(&y)).unwrap();
        let b = one.div(&x.sub(&y)).unwrap();
        let s = a.add(&b);
        // 1/(x+y) + 1/(x-y) = 2x/(x^2-y^2)
        let expect = x.scale(&BigRational::from_integer(2.into())).div(&x.mul(&x).sub(&y.mul(&y))).unwrap();
        assert!(s.value_eq(&expect));
        let back = s.mul(&x.add(&y)).mul(&x.sub(&y)).div(&x).unwrap();
        assert!(back.is_polynomial());
        assert_eq!(back.numerator().as_constant(), Some(BigRational::from_integer(2.into())));
    }

    #[test]
    fn monomial_denominators_are_absorbed() {
        let (_, x, y) = setup();
        let f = y.div(&x.mul(&x)).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.to_string(), "x^(-2)*y");
        assert!(x.sub(&x).inv().is_err());
    }

    #[test]
    fn radical_zero_test() {
        let reg = Registry::new(["x", "r"]).unwrap();
        let x = LaurentPoly::var(&reg, 0);
        let tower = Arc::new(
            Tower::new(&reg, vec![RadicalRelation { var: 1, order: 2, radicand: x.add(&LaurentPoly::one(&reg)) }])
                .unwrap(),
        );
        let r = LaurentFraction::from_poly(LaurentPoly::var(&reg, 1), Some(tower.clone()));
        let xp1 = LaurentFraction::from_poly(x.add(&LaurentPoly::one(&reg)), Some(tower));
        assert!(r.mul(&r).value_eq(&xp1));
        assert!(r.inv().unwrap().value_eq(&r.div(&xp1).unwrap()));
    }
}
