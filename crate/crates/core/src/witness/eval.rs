//! Exact evaluation of witness expressions on a general orbit member.
//!
//! Each free coordinate letter `c` is written `C^N` for a fresh variable
//! `C` (the letter keeps its name in the extended registry), so that every
//! fractional power of a single letter becomes a Laurent monomial. Products
//! are kept as products of atoms with rational exponents; fractional
//! powers distribute over the atoms. A fractional power of a composite
//! factor allocates a slot `Rk` with `Rk^N` equal to that factor. Identities
//! are finally tested modulo the resulting radical tower, which is a test
//! valid on every choice of roots.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Expr, LaurentFraction, LaurentPoly, RadicalRelation, Registry, Tower};
use crate::catalog::{coordinate_letters, letter_registry, Constraint, OrbitRecord, RadicalSpec};
use crate::error::{Error, Result};

/// Radical slots available to one evaluation.
pub const SLOTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Letter(usize),
    Factor(LaurentPoly),
    Const(BigRational),
}

/// `coef * prod atom^exp`.
#[derive(Clone, Debug)]
pub struct PP {
    pub coef: BigRational,
    pub atoms: BTreeMap<Atom, BigRational>,
}

impl PP {
    pub(crate) fn constant(c: BigRational) -> PP {
        PP { coef: c, atoms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub(crate) fn tidy(mut self) -> PP {
        if self.coef.is_zero() {
            self.atoms.clear();
            return self;
        }
        let mut folded = BigRational::one();
        self.atoms.retain(|a, e| {
            if e.is_zero() {
                return false;
            }
            if let (Atom::Const(c), true) = (a, e.is_integer()) {
                folded *= rat_pow(c, e.to_integer().to_i32().unwrap_or(0));
                return false;
            }
            true
        });
        self.coef *= folded;
        self
    }

    pub(crate) fn mul(&self, o: &PP) -> PP {
        let mut atoms = self.atoms.clone();
        for (a, e) in &o.atoms {
            *atoms.entry(a.clone()).or_insert_with(BigRational::zero) += e;
        }
        PP { coef: &self.coef * &o.coef, atoms }.tidy()
    }

    pub(crate) fn pow(&self, r: &BigRational) -> Result<PP> {
        if self.coef.is_zero() {
            return if r.is_positive() { Ok(self.clone()) } else { Err(Error::DivisionByZero) };
        }
        let mut atoms: BTreeMap<Atom, BigRational> = self.atoms.iter().map(|(a, e)| (a.clone(), e * r)).collect();
        let coef = if r.is_integer() {
            rat_pow(&self.coef, r.to_integer().to_i32().ok_or_else(|| Error::Domain("exponent too large".into()))?)
        } else if self.coef.is_one() {
            BigRational::one()
        } else {
            *atoms.entry(Atom::Const(self.coef.clone())).or_insert_with(BigRational::zero) += r;
            BigRational::one()
        };
        Ok(PP { coef, atoms }.tidy())
    }
}

fn rat_pow(c: &BigRational, k: i32) -> BigRational {
    num_traits::pow::Pow::pow(c, k)
}

#[derive(Clone, Debug)]
pub enum Value {
    PP(PP),
    Frac(LaurentFraction),
}

/// Evaluation context for one record: coordinate letters, the general
/// member, protected quantities and radical slots.
pub struct Space {
    pub n: usize,
    pub big_n: i32,
    pub letters: Arc<Registry>,
    pub ext: Arc<Registry>,
    pub nl: usize,
    /// General member in the extended registry.
    pub member: Vec<LaurentFraction>,
    /// Value of each letter when it is not a free parameter.
    letter_vals: Vec<Option<LaurentFraction>>,
    pub free_letters: Vec<usize>,
    pub protected_letters: BTreeSet<usize>,
    protected_polys: Vec<LaurentPoly>,
    named: BTreeMap<String, Expr>,
    slots: RefCell<Vec<Atom>>,
    known: RefCell<Vec<LaurentPoly>>,
}

impl Space {
    pub fn new(rec: &OrbitRecord, constraints: &[Constraint], radicals: &[RadicalSpec], big_n: i32) -> Result<Space> {
        let n = rec.rank;
        let letters = letter_registry(n)?;
        let nl = letters.len();
        let names: Vec<String> = coordinate_letters(n)?
            .iter()
            .map(|s| s.to_string())
            .chain((1..=SLOTS).map(|k| format!("R{k}")))
            .collect();
        let ext = Registry::new(names)?;
        let zero_coords: BTreeSet<usize> = rec.zero_coordinates().into_iter().collect();
        let protected_letters = nonvanishing_letters(rec)?;

        // Letter-level member with constraints solved in order.
        let var = |k: usize| LaurentFraction::from_poly(LaurentPoly::var(&letters, k), None);
        let zero = LaurentFraction::zero(&letters, None);
        let mut vals: Vec<LaurentFraction> =
            (0..nl).map(|k| if zero_coords.contains(&k) { zero.clone() } else { var(k) }).collect();
        let mut solved = BTreeSet::new();
        let mut coefficients = Vec::new();
        for c in constraints {
            if zero_coords.contains(&c.solve) || !solved.insert(c.solve) {
                return Err(Error::Witness(format!("cannot solve for `{}`", letters.name(c.solve))));
            }
            let f = c.poly.eval(&vals, &zero)?;
            let coeffs = f.numerator().coefficients_in(c.solve);
            if coeffs.keys().any(|&k| k != 0 && k != 1) || !coeffs.contains_key(&1) {
                return Err(Error::Witness(format!("constraint `{}` is not linear in `{}`", c.poly, letters.name(c.solve))));
            }
            let a = coeffs[&1].clone();
            let b = coeffs.get(&0).cloned().unwrap_or_else(|| LaurentPoly::zero(&letters));
            let value = LaurentFraction::ratio(b.neg(), &a, None)?;
            coefficients.push(a);
            let mut point: Vec<LaurentFraction> = (0..nl).map(var).collect();
            point[c.solve] = value.clone();
            for v in vals.iter_mut() {
                *v = substitute(v, &point)?;
            }
            vals[c.solve] = value;
        }
        for p in rec.nonlinear_zero_set() {
            let v = p.eval(&vals, &zero)?;
            if !v.is_zero() {
                return Err(Error::Witness(format!("the general member does not satisfy {p} = 0")));
            }
        }
        let free_letters: Vec<usize> = (0..nl).filter(|k| !zero_coords.contains(k) && !solved.contains(k)).collect();
        if free_letters.len() != rec.dim {
            return Err(Error::Witness(format!(
                "general member has {} free letters but the orbit has dimension {}",
                free_letters.len(),
                rec.dim
            )));
        }

        let mut sp = Space {
            n,
            big_n,
            letters: letters.clone(),
            ext: ext.clone(),
            nl,
            member: Vec::new(),
            letter_vals: Vec::new(),
            free_letters: free_letters.clone(),
            protected_letters,
            protected_polys: Vec::new(),
            named: radicals
                .iter()
                .map(|r| (r.name.clone(), Expr::Pow(Box::new(r.radicand.clone()), BigRational::new(1.into(), r.order.into()))))
                .collect(),
            slots: RefCell::new(Vec::new()),
            known: RefCell::new(Vec::new()),
        };
        let expanded: Vec<LaurentFraction> = vals.iter().map(|v| sp.expand_frac(v)).collect::<Result<_>>()?;
        for p in &rec.nonzero_set {
            let v = sp.expand_frac(&p.eval(&vals, &zero)?)?;
            if v.is_zero() {
                return Err(Error::Witness(format!("nonzero condition {p} vanishes on the general member")));
            }
            let (_, _, prim) = v.numerator().split_content();
            if !prim.is_one() {
                sp.protected_polys.push(prim);
            }
        }
        for a in &coefficients {
            let a = sp.expand_poly(a)?;
            if !sp.is_protected(&a) {
                return Err(Error::Witness(format!("solving a constraint divides by {}, which may vanish", sp.show_poly(&a))));
            }
        }
        sp.letter_vals = (0..nl)
            .map(|k| if free_letters.contains(&k) { None } else { Some(expanded[k].clone()) })
            .collect();
        sp.member = expanded;
        Ok(sp)
    }

    fn expand_poly(&self, p: &LaurentPoly) -> Result<LaurentPoly> {
        let mut q = p.lift(&self.ext)?;
        for v in 0..self.nl {
            q = q.expand_var(v, self.big_n);
        }
        Ok(q)
    }

    fn expand_frac(&self, f: &LaurentFraction) -> Result<LaurentFraction> {
        let lifted = f.lift(&self.ext, None)?;
        let (nl, g) = (self.nl, self.big_n);
        Ok(lifted.map_polys(&|p: &LaurentPoly| (0..nl).fold(p.clone(), |q, v| q.expand_var(v, g))))
    }

    /// Polynomial in letters, if `p` uses only letters with exponents divisible by `N`.
    pub fn compress(&self, p: &LaurentPoly) -> Option<LaurentPoly> {
        let mut q = p.clone();
        for v in 0..self.nl {
            q = q.compress_var(v, self.big_n)?;
        }
        if q.vars_used().iter().any(|&v| v >= self.nl) {
            return None;
        }
        let mut out = LaurentPoly::zero(&self.letters);
        for (e, c) in q.terms() {
            out.add_term(e[..self.nl].to_vec(), c.clone());
        }
        Some(out)
    }

    /// Readable form: letters with exponents divided by `N`.
    pub fn show_poly(&self, p: &LaurentPoly) -> String {
        p.render(&|v, e| self.power_name(v, e))
    }

    pub fn show_frac(&self, f: &LaurentFraction) -> String {
        f.render(&|v, e| self.power_name(v, e))
    }

    fn power_name(&self, v: usize, e: i32) -> String {
        let name = self.ext.name(v);
        let (num, den) = if v < self.nl {
            let r = BigRational::new(e.into(), self.big_n.into());
            (r.numer().to_i64().unwrap_or(0), r.denom().to_i64().unwrap_or(1))
        } else {
            (e as i64, 1)
        };
        match (num, den) {
            (1, 1) => name.to_string(),
            (k, 1) if k > 0 => format!("{name}^{k}"),
            (k, 1) => format!("{name}^({k})"),
            (k, d) => format!("{name}^({k}/{d})"),
        }
    }

    // ------------------------------------------------------------ atoms

    pub fn slot_atoms(&self) -> Vec<Atom> {
        self.slots.borrow().clone()
    }

    fn slot_for(&self, a: &Atom) -> Result<usize> {
        let mut s = self.slots.borrow_mut();
        if let Some(k) = s.iter().position(|x| x == a) {
            return Ok(k);
        }
        if s.len() == SLOTS {
            return Err(Error::Witness("too many distinct radicands".into()));
        }
        s.push(a.clone());
        Ok(s.len() - 1)
    }

    fn atom_poly(&self, a: &Atom) -> LaurentPoly {
        match a {
            Atom::Letter(k) => {
                let mut e = vec![0; self.ext.len()];
                e[*k] = self.big_n;
                LaurentPoly::monomial(&self.ext, e, BigRational::one())
            }
            Atom::Factor(p) => p.clone(),
            Atom::Const(c) => LaurentPoly::constant(&self.ext, c.clone()),
        }
    }

    /// Relations `Rk^N = radicand` for the slots allocated so far.
    pub fn tower(&self) -> Result<Tower> {
        let rels = self
            .slots
            .borrow()
            .iter()
            .enumerate()
            .map(|(k, a)| RadicalRelation { var: self.nl + k, order: self.big_n as u32, radicand: self.atom_poly(a) })
            .collect();
        Tower::new(&self.ext, rels)
    }

    fn exponent_times_n(&self, e: &BigRational) -> Result<i32> {
        let k = e * BigRational::from_integer(self.big_n.into());
        if !k.is_integer() {
            return Err(Error::Witness(format!("exponent {e} needs a root of order not dividing {}", self.big_n)));
        }
        k.to_integer().to_i32().ok_or_else(|| Error::Domain("exponent too large".into()))
    }

    pub fn lower(&self, v: &Value) -> Result<LaurentFraction> {
        let pp = match v {
            Value::Frac(f) => return Ok(f.clone()),
            Value::PP(pp) => pp,
        };
        if pp.is_zero() {
            return Ok(LaurentFraction::zero(&self.ext, None));
        }
        let mut mono = vec![0i32; self.ext.len()];
        let mut acc = LaurentFraction::constant(&self.ext, pp.coef.clone(), None);
        for (a, e) in &pp.atoms {
            match a {
                Atom::Letter(k) => mono[*k] += self.exponent_times_n(e)?,
                Atom::Factor(p) if e.is_integer() => {
                    let k = e.to_integer().to_i32().ok_or_else(|| Error::Domain("exponent too large".into()))?;
                    acc = acc.mul(&LaurentFraction::from_poly(p.clone(), None).pow(k)?);
                }
                _ => {
                    let s = self.slot_for(a)?;
                    mono[self.nl + s] += self.exponent_times_n(e)?;
                }
            }
        }
        Ok(acc.mul(&LaurentFraction::from_poly(LaurentPoly::monomial(&self.ext, mono, BigRational::one()), None)))
    }

    fn factor_into(&self, p: &LaurentPoly, sign: i32, out: &mut PP) {
        let mut rest = p.clone();
        for q in self.known.borrow().iter() {
            while !rest.is_one() {
                match rest.div_exact(q) {
                    Some(r) => {
                        rest = r;
                        *out.atoms.entry(Atom::Factor(q.clone())).or_insert_with(BigRational::zero) += BigRational::from_integer(sign.into());
                    }
                    None => break,
                }
            }
        }
        let (c, mono, prim) = rest.split_content();
        let c = if sign > 0 { c } else { c.recip() };
        out.coef *= c;
        self.mono_into(&mono, sign, out);
        if !prim.is_one() {
            self.known.borrow_mut().push(prim.clone());
            *out.atoms.entry(Atom::Factor(prim)).or_insert_with(BigRational::zero) += BigRational::from_integer(sign.into());
        }
    }

    fn mono_into(&self, mono: &[i32], sign: i32, out: &mut PP) {
        let slots = self.slots.borrow();
        for (v, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let r = BigRational::new((sign * e).into(), self.big_n.into());
            let atom = if v < self.nl { Atom::Letter(v) } else { slots[v - self.nl].clone() };
            *out.atoms.entry(atom).or_insert_with(BigRational::zero) += r;
        }
    }

    /// Multiplicative form of a rational function.
    pub fn to_pp(&self, v: &Value) -> PP {
        let f = match v {
            Value::PP(pp) => return pp.clone(),
            Value::Frac(f) => f,
        };
        if f.is_zero() {
            return PP::constant(BigRational::zero());
        }
        let mut out = PP::constant(BigRational::one());
        self.factor_into(f.numerator(), 1, &mut out);
        for (g, &e) in f.den_factors() {
            for _ in 0..e {
                self.factor_into(g, -1, &mut out);
            }
        }
        out.tidy()
    }

    // ------------------------------------------------------ arithmetic

    fn mul(&self, a: &Value, b: &Value) -> Value {
        Value::PP(self.to_pp(a).mul(&self.to_pp(b)))
    }

    fn pow(&self, a: &Value, r: &BigRational) -> Result<Value> {
        Ok(Value::PP(self.to_pp(a).pow(r)?))
    }

    fn add(&self, a: &Value, b: &Value, negate: bool) -> Result<Value> {
        let x = self.lower(a)?;
        let y = self.lower(b)?;
        Ok(Value::Frac(if negate { x.sub(&y) } else { x.add(&y) }))
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        Ok(match e {
            Expr::Num(r) => Value::PP(PP::constant(r.clone())),
            Expr::Var(name) => match self.letters.index_of(name) {
                Some(k) => match &self.letter_vals[k] {
                    Some(f) => Value::Frac(f.clone()),
                    None => Value::PP(PP { coef: BigRational::one(), atoms: [(Atom::Letter(k), BigRational::one())].into() }),
                },
                None => match self.named.get(name) {
                    Some(x) => self.eval(x)?,
                    None => return Err(Error::UnknownVariable(name.clone())),
                },
            },
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?, false)?,
            Expr::Sub(a, b) => self.add(&self.eval(a)?, &self.eval(b)?, true)?,
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(a, b) => {
                let d = self.pow(&self.eval(b)?, &-BigRational::one())?;
                self.mul(&self.eval(a)?, &d)
            }
            Expr::Neg(a) => match self.eval(a)? {
                Value::PP(mut pp) => {
                    pp.coef = -pp.coef;
                    Value::PP(pp)
                }
                Value::Frac(f) => Value::Frac(f.neg()),
            },
            Expr::Pow(a, r) => self.pow(&self.eval(a)?, r)?,
        })
    }

    // ---------------------------------------------------- protection

    /// True when `p` cannot vanish on the orbit's set: its monomial part
    /// uses protected letters or radicals of protected radicands, and its
    /// remaining factor divides a product of nonzero conditions.
    pub fn is_protected(&self, p: &LaurentPoly) -> bool {
        if p.is_zero() {
            return false;
        }
        let (_, mono, prim) = p.split_content();
        for (v, &e) in mono.iter().enumerate() {
            if e != 0 && !self.var_protected(v) {
                return false;
            }
        }
        if prim.is_one() {
            return true;
        }
        let mut rest = prim;
        for q in &self.protected_polys {
            while let Some(r) = rest.div_exact(q) {
                rest = r;
                if rest.num_terms() == 1 {
                    return true;
                }
            }
        }
        if rest.num_terms() == 1 {
            return true;
        }
        let product = self.protected_polys.iter().fold(LaurentPoly::one(&self.ext), |a, q| a.mul(q));
        product.div_exact(&rest).is_some()
    }

    fn var_protected(&self, v: usize) -> bool {
        if v < self.nl {
            return self.protected_letters.contains(&v);
        }
        match self.slots.borrow().get(v - self.nl) {
            Some(a) => self.atom_protected(a),
            None => false,
        }
    }

    pub fn atom_protected(&self, a: &Atom) -> bool {
        match a {
            Atom::Letter(k) => self.protected_letters.contains(k),
            Atom::Factor(p) => self.is_protected(p),
            Atom::Const(c) => !c.is_zero(),
        }
    }

    /// Atoms of `v` that must not vanish (negative or fractional powers,
    /// or every atom when `nonvanishing`) but are not protected.
    pub fn unsound_atoms(&self, v: &Value, nonvanishing: bool) -> Vec<String> {
        let pp = self.to_pp(v);
        let mut out = Vec::new();
        if nonvanishing && pp.is_zero() {
            out.push("0".into());
        }
        for (a, e) in &pp.atoms {
            let needs = nonvanishing || e.is_negative() || !e.is_integer();
            if needs && !self.atom_protected(a) {
                out.push(self.show_atom(a));
            }
        }
        out
    }

    pub fn show_atom(&self, a: &Atom) -> String {
        match a {
            Atom::Letter(k) => self.letters.name(*k).to_string(),
            Atom::Factor(p) => format!("({})", self.show_poly(p)),
            Atom::Const(c) => format!("({c})"),
        }
    }

    /// Expression text for a multiplicative value in the coordinate letters.
    pub fn render_pp(&self, pp: &PP) -> Option<String> {
        if pp.is_zero() {
            return Some("0".into());
        }
        let mut parts = Vec::new();
        for (a, e) in &pp.atoms {
            let base = match a {
                Atom::Letter(k) => self.letters.name(*k).to_string(),
                Atom::Factor(p) => format!("({})", self.compress(p)?),
                Atom::Const(c) => format!("({c})"),
            };
            parts.push(if e.is_one() {
                base
            } else if e.is_integer() && e.is_positive() {
                format!("{base}^{e}")
            } else {
                format!("{base}^({e})")
            });
        }
        let c = &pp.coef;
        let s = match (c.is_one(), (-c).is_one(), parts.is_empty()) {
            (_, _, true) => format!("{c}"),
            (true, _, false) => parts.join("*"),
            (_, true, false) => format!("-{}", parts.join("*")),
            _ => format!("({c})*{}", parts.join("*")),
        };
        Some(s)
    }
}

/// Letters that are nonzero on the whole set: those dividing a nonzero
/// generator once the zero coordinates are set to 0.
pub fn nonvanishing_letters(rec: &OrbitRecord) -> Result<BTreeSet<usize>> {
    let letters = letter_registry(rec.rank)?;
    let zero_coords: BTreeSet<usize> = rec.zero_coordinates().into_iter().collect();
    let zero = LaurentPoly::zero(&letters);
    let vals: Vec<LaurentPoly> = (0..letters.len())
        .map(|k| if zero_coords.contains(&k) { zero.clone() } else { LaurentPoly::var(&letters, k) })
        .collect();
    let mut out = BTreeSet::new();
    for p in &rec.nonzero_set {
        let (_, mono, _) = p.eval(&vals, &zero)?.split_content();
        out.extend(mono.iter().enumerate().filter(|(_, &e)| e != 0).map(|(v, _)| v));
    }
    Ok(out)
}

/// `f` with every variable replaced by `point[v]`.
fn substitute(f: &LaurentFraction, point: &[LaurentFraction]) -> Result<LaurentFraction> {
    let proto = LaurentFraction::zero(f.registry(), None);
    let mut out = f.numerator().eval(point, &proto)?;
    for (g, &e) in f.den_factors() {
        out = out.div(&g.eval(point, &proto)?.pow(e as i32)?)?;
    }
    Ok(out)
}

/// Integer `gcd` helper shared with the numeric checker.
pub fn gcd_i32(a: i32, b: i32) -> i32 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn fractional_powers_distribute() {
        let c = load_catalog(3).unwrap();
        let rec = c.get("x11+x22+x33").unwrap();
        let sp = Space::new(rec, &[], &[], 60).unwrap();
        let v = sp.eval(&crate::arith::parse_expr("(u^3*y)^(1/2) * u^(-3/2)").unwrap()).unwrap();
        let f = sp.lower(&v).unwrap();
        assert_eq!(sp.show_frac(&f), "y^(1/2)");
        assert!(sp.slot_atoms().is_empty());
    }

    #[test]
    fn composite_radicands_get_slots() {
        let c = load_catalog(3).unwrap();
        let rec = c.get("x11+x22+x33").unwrap();
        let sp = Space::new(rec, &[], &[], 60).unwrap();
        let e = crate::arith::parse_expr("(x*y + z)^(1/2) * (x*y + z)^(1/2) - x*y - z").unwrap();
        let f = sp.lower(&sp.eval(&e).unwrap()).unwrap();
        let t = Arc::new(sp.tower().unwrap());
        assert!(f.with_tower(Some(t)).is_zero());
    }

    #[test]
    fn constraints_solve_and_protect() {
        let c = load_catalog(3).unwrap();
        let rec = c.get("x22").unwrap();
        let lreg = letter_registry(3).unwrap();
        let cons = [Constraint { poly: crate::arith::parse_poly("v*z - x*y", &lreg).unwrap(), solve: 5 }];
        let sp = Space::new(rec, &cons, &[], 60).unwrap();
        assert_eq!(sp.free_letters, [1, 3, 4]);
        let z = sp.member[5].clone();
        assert_eq!(sp.show_frac(&z), "v^(-1)*x*y");
        let bad = [Constraint { poly: crate::arith::parse_poly("v*z - x*y", &lreg).unwrap(), solve: 1 }];
        assert!(Space::new(rec, &bad, &[], 60).is_err());
    }
}
