//! Radical towers: adjoined variables `R` with `R^k = radicand`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::poly::{LaurentPoly, Registry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalRelation {
    /// Registry index of the adjoined variable.
    pub var: usize,
    pub order: u32,
    pub radicand: LaurentPoly,
}

/// An ordered list of relations; each radicand may only mention radical
/// variables introduced earlier, which makes reduction terminate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    reg: Arc<Registry>,
    relations: Vec<RadicalRelation>,
}

impl Tower {
    pub fn empty(reg: &Arc<Registry>) -> Tower {
        Tower { reg: reg.clone(), relations: Vec::new() }
    }

    pub fn new(reg: &Arc<Registry>, relations: Vec<RadicalRelation>) -> Result<Tower> {
        let mut t = Tower::empty(reg);
        for r in relations {
            t.push(r)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, rel: RadicalRelation) -> Result<()> {
        if rel.order < 2 {
            return Err(Error::Radical(format!("order {} must be at least 2", rel.order)));
        }
        if rel.var >= self.reg.len() {
            return Err(Error::Radical(format!("variable index {} outside the registry", rel.var)));
        }
        if self.relations.iter().any(|r| r.var == rel.var) {
            return Err(Error::Radical(format!("`{}` adjoined twice", self.reg.name(rel.var))));
        }
        if rel.radicand.is_zero() {
            return Err(Error::Radical("zero radicand".into()));
        }
        let used = rel.radicand.vars_used();
        if used.contains(&rel.var) {
            return Err(Error::Radical(format!("`{}` appears in its own radicand", self.reg.name(rel.var))));
        }
        // A radicand that mentions a variable adjoined later would break triangularity;
        // since `rel` is appended last, any radical var it mentions is already present.
        self.relations.push(rel);
        Ok(())
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn relations(&self) -> &[RadicalRelation] {
        &self.relations
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn is_radical_var(&self, v: usize) -> bool {
        self.relations.iter().any(|r| r.var == v)
    }

    /// Reduce exponents `>= k` of every radical variable; negative exponents are kept.
    pub fn reduce(&self, p: &LaurentPoly) -> LaurentPoly {
        let mut cur = p.clone();
        for rel in self.relations.iter().rev() {
            if cur.max_degree_in(rel.var) < rel.order as i32 {
                continue;
            }
            let k = rel.order as i32;
            let mut out = LaurentPoly::zero(&self.reg);
            let mut pow_cache: Vec<LaurentPoly> = vec![LaurentPoly::one(&self.reg)];
            for (e, c) in cur.terms() {
                if e[rel.var] < k {
                    out.add_term(e.clone(), c.clone());
                    continue;
                }
                let q = (e[rel.var] / k) as usize;
                let mut rest = e.clone();
                rest[rel.var] %= k;
                while pow_cache.len() <= q {
                    let next = pow_cache.last().unwrap().mul(&rel.radicand);
                    pow_cache.push(next);
                }
                out = out.add(&pow_cache[q].mul_monomial(&rest, c));
            }
            cur = out;
        }
        cur
    }

    /// Canonical form with every radical exponent in `[0, k)`.
    pub fn normalize(&self, p: &LaurentPoly) -> Result<LaurentPoly> {
        for rel in &self.relations {
            if p.min_degree_in(rel.var) < 0 {
                return Err(Error::Radical(format!(
                    "negative power of `{}` has no polynomial normal form",
                    self.reg.name(rel.var)
                )));
            }
        }
        Ok(self.reduce(p))
    }

    /// Zero test valid on every branch: clear negative radical powers by a
    /// unit, then reduce.
    pub fn is_zero(&self, p: &LaurentPoly) -> bool {
        if p.is_zero() {
            return true;
        }
        let mut shift = vec![0; self.reg.len()];
        for rel in &self.relations {
            let m = p.min_degree_in(rel.var);
            if m < 0 {
                shift[rel.var] = -m;
            }
        }
        let cleared = p.mul_monomial(&shift, &BigRational::one());
        self.reduce(&cleared).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_two() {
        let reg = Registry::new(["r"]).unwrap();
        let r = LaurentPoly::var(&reg, 0);
        let two = LaurentPoly::int(&reg, 2);
        let t = Tower::new(&reg, vec![RadicalRelation { var: 0, order: 2, radicand: two.clone() }]).unwrap();
        assert_eq!(t.normalize(&r.pow(2)).unwrap(), two);
        assert!(t.is_zero(&r.pow(2).sub(&two)));
        let rinv = r.monomial_inverse().unwrap();
        assert!(t.is_zero(&rinv.sub(&r.scale(&BigRational::new(1.into(), 2.into())))));
        assert!(t.normalize(&rinv).is_err());
    }

    #[test]
    fn nested_tower() {
        let reg = Registry::new(["x", "a", "b"]).unwrap();
        let x = LaurentPoly::var(&reg, 0);
        let a = LaurentPoly::var(&reg, 1);
        let b = LaurentPoly::var(&reg, 2);
        let t = Tower::new(
            &reg,
            vec![
                RadicalRelation { var: 1, order: 3, radicand: x.clone() },
                RadicalRelation { var: 2, order: 2, radicand: a.add(&LaurentPoly::one(&reg)) },
            ],
        )
        .unwrap();
        let lhs = b.pow(6);
        let rhs = a.add(&LaurentPoly::one(&reg)).pow(3);
        assert!(t.is_zero(&lhs.sub(&rhs)));
        assert_eq!(t.normalize(&lhs).unwrap(), t.normalize(&rhs).unwrap());
        assert!(!t.is_zero(&b.sub(&a)));
    }

    #[test]
    fn rejects_bad_relations() {
        let reg = Registry::new(["x", "r"]).unwrap();
        let r = LaurentPoly::var(&reg, 1);
        assert!(Tower::new(&reg, vec![RadicalRelation { var: 1, order: 2, radicand: r.clone() }]).is_err());
        assert!(Tower::new(&reg, vec![RadicalRelation { var: 1, order: 1, radicand: LaurentPoly::var(&reg, 0) }])
            .is_err());
    }
}
