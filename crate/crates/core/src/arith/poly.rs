//! Sparse multivariate Laurent polynomials over Q.
//!
//! Variables live in a shared [`Registry`]; monomials are dense exponent
//! vectors indexed by registration order, and the term order is the
//! lexicographic order on those vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fp::Fp;
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Registry {
    names: Vec<String>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Registry {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Registry>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_ident(n) {
                return Err(Error::Domain(format!("invalid variable name `{n}`")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Domain(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Arc::new(Registry { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A new registry with `extra` appended after the existing names.
    pub fn extend<S: Into<String>>(&self, extra: impl IntoIterator<Item = S>) -> Result<Arc<Registry>> {
        Registry::new(self.names.iter().cloned().chain(extra.into_iter().map(Into::into)))
    }
}

pub type Exponents = Vec<i32>;

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

#[derive(Clone)]
pub struct LaurentPoly {
    reg: Arc<Registry>,
    terms: BTreeMap<Exponents, BigRational>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && (Arc::ptr_eq(&self.reg, &other.reg) || self.reg == other.reg)
    }
}

impl Eq for LaurentPoly {}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl std::hash::Hash for LaurentPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (e, c) in &self.terms {
            e.hash(state);
            c.hash(state);
        }
    }
}

impl LaurentPoly {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        LaurentPoly { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(reg: &Arc<Registry>) -> Self {
        Self::constant(reg, BigRational::one())
    }

    pub fn constant(reg: &Arc<Registry>, c: BigRational) -> Self {
        Self::monomial(reg, vec![0; reg.len()], c)
    }

    pub fn int(reg: &Arc<Registry>, k: i64) -> Self {
        Self::constant(reg, rat(k))
    }

    pub fn var(reg: &Arc<Registry>, i: usize) -> Self {
        let mut e = vec![0; reg.len()];
        e[i] = 1;
        Self::monomial(reg, e, BigRational::one())
    }

    pub fn var_named(reg: &Arc<Registry>, name: &str) -> Result<Self> {
        let i = reg.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var(reg, i))
    }

    pub fn monomial(reg: &Arc<Registry>, exps: Exponents, c: BigRational) -> Self {
        assert_eq!(exps.len(), reg.len(), "exponent vector length must match the registry");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { reg: reg.clone(), terms }
    }

    pub fn from_terms(reg: &Arc<Registry>, terms: impl IntoIterator<Item = (Exponents, BigRational)>) -> Self {
        let mut p = Self::zero(reg);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, BigRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Exponents, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn same_reg(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.reg, &other.reg) || self.reg == other.reg,
            "polynomials over different registries: {:?} vs {:?}",
            self.reg.names,
            other.reg.names
        );
    }

    pub fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_reg(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_reg(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { reg: self.reg.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(&self.reg);
        }
        LaurentPoly { reg: self.reg.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    /// Multiply by the Laurent monomial `k * x^shift`.
    pub fn mul_monomial(&self, shift: &[i32], k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(&self.reg);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c * k))
            .collect();
        LaurentPoly { reg: self.reg.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_reg(other);
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        let mut out = Self::zero(&self.reg);
        for (e1, c1) in &small.terms {
            for (e2, c2) in &big.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.reg);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Inverse when the polynomial is a single Laurent monomial.
    pub fn monomial_inverse(&self) -> Option<Self> {
        let (e, c) = self.as_monomial()?;
        Some(Self::monomial(&self.reg, e.iter().map(|x| -x).collect(), c.recip()))
    }

    pub fn vars_used(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    s.insert(i);
                }
            }
        }
        s
    }

    pub fn max_degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|e| e.iter().sum::<i32>()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<i32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// Coefficients of `var^k` as polynomials in the remaining variables.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<i32, LaurentPoly> {
        let mut out: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest[var];
            rest[var] = 0;
            out.entry(k).or_insert_with(|| Self::zero(&self.reg)).add_term(rest, c.clone());
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.reg);
        for (e, c) in &self.terms {
            if e[var] != 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * rat(e[var] as i64));
            }
        }
        out
    }

    /// Re-express over another registry that contains every variable used.
    pub fn lift(&self, target: &Arc<Registry>) -> Result<Self> {
        let map: Vec<Option<usize>> = self.reg.names.iter().map(|n| target.index_of(n)).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    let j = map[i].ok_or_else(|| Error::UnknownVariable(self.reg.names[i].clone()))?;
                    e2[j] += x;
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Replace `var` by `var^(1/g)`; `None` unless every exponent of `var` is divisible by `g`.
    pub fn compress_var(&self, var: usize, g: i32) -> Option<Self> {
        if self.terms.keys().any(|e| e[var] % g != 0) {
            return None;
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] /= g;
                (e2, c.clone())
            })
            .collect();
        Some(LaurentPoly { reg: self.reg.clone(), terms })
    }

    /// Replace `var` by `var^g`.
    pub fn expand_var(&self, var: usize, g: i32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] *= g;
                (e2, c.clone())
            })
            .collect();
        LaurentPoly { reg: self.reg.clone(), terms }
    }

    /// Split as `coeff * x^mono * primitive`, where the primitive part has
    /// minimal exponent zero in every variable and leading coefficient one.
    pub fn split_content(&self) -> (BigRational, Exponents, LaurentPoly) {
        if self.is_zero() {
            return (BigRational::zero(), vec![0; self.reg.len()], Self::zero(&self.reg));
        }
        let n = self.reg.len();
        let mins: Exponents = (0..n).map(|i| self.min_degree_in(i)).collect();
        let lc = self.leading_term().unwrap().1.clone();
        let neg: Exponents = mins.iter().map(|x| -x).collect();
        let prim = self.mul_monomial(&neg, &lc.recip());
        (lc, mins, prim)
    }

    /// Exact quotient `self / f`, or `None` if `f` does not divide `self`
    /// in the Laurent polynomial ring.
    pub fn div_exact(&self, f: &Self) -> Option<Self> {
        self.same_reg(f);
        if f.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(&self.reg));
        }
        if let Some((e, c)) = f.as_monomial() {
            let neg: Exponents = e.iter().map(|x| -x).collect();
            return Some(self.mul_monomial(&neg, &c.recip()));
        }
        let n = self.reg.len();
        // The quotient's exponents are confined to a box determined by the
        // per-variable degree ranges; leaving it proves non-divisibility.
        let lo: Exponents = (0..n).map(|i| self.min_degree_in(i) - f.min_degree_in(i)).collect();
        let hi: Exponents = (0..n).map(|i| self.max_degree_in(i) - f.max_degree_in(i)).collect();
        let (fe, fc) = f.leading_term().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.reg);
        let mut steps = 0usize;
        while let Some((re, rc)) = rem.leading_term() {
            let te: Exponents = re.iter().zip(&fe).map(|(a, b)| a - b).collect();
            if te.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                return None;
            }
            let tc = rc / &fc;
            rem = rem.sub(&f.mul_monomial(&te, &tc));
            quot.add_term(te, tc);
            steps += 1;
            if steps > 1_000_000 {
                return None;
            }
        }
        Some(quot)
    }

    /// Evaluate in any ring, given one value per registry variable.
    pub fn eval<R: Ring>(&self, values: &[R], proto: &R) -> Result<R> {
        assert_eq!(values.len(), self.reg.len());
        let mut cache: HashMap<(usize, i32), R> = HashMap::new();
        let mut inv_cache: HashMap<usize, R> = HashMap::new();
        let mut acc = proto.zero_like();
        for (e, c) in &self.terms {
            let mut t = rational_into(proto, c)?;
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((i, x)) {
                    let base = if x > 0 {
                        values[i].clone()
                    } else {
                        if let std::collections::hash_map::Entry::Vacant(e) = inv_cache.entry(i) {
                            e.insert(values[i].inverse()?);
                        }
                        inv_cache[&i].clone()
                    };
                    e.insert(ring_pow(&base, x.unsigned_abs()));
                }
                t = t.times(&cache[&(i, x)]);
            }
            acc = acc.plus(&t);
        }
        Ok(acc)
    }

    pub fn eval_mod_p(&self, point: &[Fp], p: u64) -> Result<Fp> {
        let mut acc = Fp::zero(p);
        for (e, c) in &self.terms {
            let mut t = Fp::from_rational(c, p).ok_or(Error::DivisionByZero)?;
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    t = t * point[i].powi(x as i64).ok_or(Error::DivisionByZero)?;
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        self.eval(point, &BigRational::zero())
    }

    /// Render with a custom formatter for each `variable^exponent` factor.
    pub fn render(&self, power: &dyn Fn(usize, i32) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> =
                e.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| power(i, x)).collect();
            let neg = c.is_negative();
            let a = c.abs();
            let body = if mono.is_empty() {
                fmt_rat(&a)
            } else if a.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", fmt_rat(&a), mono.join("*"))
            };
            match (k, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body)
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body)
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body)
                }
            }
        }
        out
    }
}

pub(crate) fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_into<R: Ring>(proto: &R, c: &BigRational) -> Result<R> {
    let num = bigint_into(proto, c.numer());
    if c.denom().is_one() {
        return Ok(num);
    }
    let den = bigint_into(proto, c.denom());
    Ok(num.times(&den.inverse()?))
}

fn bigint_into<R: Ring>(proto: &R, k: &BigInt) -> R {
    use num_traits::ToPrimitive;
    if let Some(small) = k.to_i64() {
        if small.unsigned_abs() <= 64 {
            return proto.from_i64_like(small);
        }
    }
    // Horner in base 2^16 keeps generic carriers cheap.
    let (sign, digits) = k.to_u32_digits();
    let base = proto.from_i64_like(1 << 16);
    let mut acc = proto.zero_like();
    for d in digits.iter().rev() {
        for half in [d >> 16, d & 0xffff] {
            acc = acc.times(&base).plus(&proto.from_i64_like(half as i64));
        }
    }
    if sign == num_bigint::Sign::Minus {
        acc.negate()
    } else {
        acc
    }
}

pub fn ring_pow<R: Ring>(base: &R, mut k: u32) -> R {
    let mut acc = base.one_like();
    let mut b = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.times(&b);
        }
        k >>= 1;
        if k > 0 {
            b = b.times(&b);
        }
    }
    acc
}

pub(crate) fn plain_power(reg: &Registry) -> impl Fn(usize, i32) -> String + '_ {
    move |i, x| {
        if x == 1 {
            reg.name(i).to_string()
        } else if x < 0 {
            format!("{}^({})", reg.name(i), x)
        } else {
            format!("{}^{}", reg.name(i), x)
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&plain_power(&self.reg)))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Ring for LaurentPoly {
    fn zero_like(&self) -> Self {
        Self::zero(&self.reg)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.reg)
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
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.monomial_inverse().ok_or_else(|| Error::NotInvertible(self.to_string()))
    }
    fn from_i64_like(&self, k: i64) -> Self {
        Self::int(&self.reg, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Arc<Registry> {
        Registry::new(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn ring_identities() {
        let r = reg();
        let x = LaurentPoly::var(&r, 0);
        let y = LaurentPoly::var(&r, 1);
        let s = x.add(&y);
        let d = x.sub(&y);
        assert_eq!(s.mul(&d), x.pow(2).sub(&y.pow(2)));
        assert_eq!(s.pow(3).num_terms(), 4);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn laurent_inverse_and_division() {
        let r = reg();
        let x = LaurentPoly::var(&r, 0);
        let y = LaurentPoly::var(&r, 1);
        let xi = x.monomial_inverse().unwrap();
        assert!(x.mul(&xi).is_one());
        let f = x.add(&y);
        let g = x.sub(&y).mul(&y);
        let prod = f.mul(&g).mul(&xi);
        assert_eq!(prod.div_exact(&f).unwrap(), g.mul(&xi));
        assert!(x.pow(2).add(&y).div_exact(&f).is_none());
    }

    #[test]
    fn content_split() {
        let r = reg();
        let x = LaurentPoly::var(&r, 0);
        let y = LaurentPoly::var(&r, 1);
        let p = x.mul(&y).scale(&rat(3)).add(&x.pow(2).mul(&y).scale(&rat(6)));
        let (c, m, prim) = p.split_content();
        assert_eq!(c, rat(6));
        assert_eq!(m, vec![1, 1, 0]);
        assert_eq!(prim.to_string(), "x + 1/2");
    }

    #[test]
    fn render_and_eval() {
        let r = reg();
        let x = LaurentPoly::var(&r, 0);
        let z = LaurentPoly::var(&r, 2);
        let p = x.mul(&z.monomial_inverse().unwrap()).sub(&LaurentPoly::int(&r, 2));
        assert_eq!(p.to_string(), "x*z^(-1) - 2");
        let v = p.eval_rational(&[rat(6), rat(0), rat(3)]).unwrap();
        assert!(v.is_zero());
        let fp = p.eval_mod_p(&[Fp::new(6, 7), Fp::new(0, 7), Fp::new(3, 7)], 7).unwrap();
        assert!(fp.is_zero());
        assert!(p.eval_rational(&[rat(1), rat(1), rat(0)]).is_err());
    }

    #[test]
    fn lift_and_derivative() {
        let r = reg();
        let r2 = Registry::new(["w", "z", "x"]).unwrap();
        let p = LaurentPoly::var(&r, 0).mul(&LaurentPoly::var(&r, 2)).pow(2);
        let q = p.lift(&r2).unwrap();
        assert_eq!(q.to_string(), "z^2*x^2");
        assert_eq!(p.derivative(0).to_string(), "2*x*z^2");
        let r3 = Registry::new(["x"]).unwrap();
        assert!(p.lift(&r3).is_err());
    }
}
