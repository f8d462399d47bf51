//! The closure order on strata and its Hasse diagram.
//!
//! `i <= j` means `S_i` lies in the closure of `S_j`. That closure sits
//! inside `Z(j.zero_set)` but can be smaller when the zero set is
//! reducible, so it is cut out by the zero set together with interpolated
//! low-degree equations (see [`extra_closure_equations`]). The symbolic
//! layer evaluates these on `i`'s general member; the point layer checks
//! every point of `S_i` over small fields and supplies explicit
//! counterexamples for non-relations.

mod equations;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{Fp, LaurentFraction, LaurentPoly};
use crate::catalog::{Catalog, OrbitRecord};
use crate::classify::{PointTable, DEFAULT_CENSUS_BUDGET};
use crate::error::{Error, Result};
use crate::witness::eval::Space;

pub use equations::{extra_closure_equations, CLOSURE_DEGREE};

/// Fields whose points certify the order.
pub fn certifying_fields(n: usize) -> &'static [u64] {
    if n == 4 {
        &[2, 3]
    } else {
        &[3, 5, 7]
    }
}

/// Prime used to find counterexamples on the general member when the
/// small fields have none.
const SAMPLE_PRIME: u64 = 101;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub q: u64,
    pub point: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeqDecision {
    pub holds: bool,
    /// `None` when the symbolic layer could not decide.
    pub symbolic: Option<bool>,
    /// A point of `S_i` outside `Z(j.zero_set)`, whenever `holds` is false.
    pub counterexample: Option<Counterexample>,
}

/// Point tables for one rank, shared by all pairwise decisions.
pub struct ClosureOracle<'a> {
    cat: &'a Catalog,
    tables: Vec<PointTable>,
    members: Vec<Option<Vec<LaurentFraction>>>,
    /// Closure equations beyond each zero set.
    pub extras: Vec<Vec<LaurentPoly>>,
    /// Per table and stratum: whether the extra equations vanish at each
    /// point (`None` when there are none).
    on_extras: Vec<Vec<Option<Vec<bool>>>>,
}

impl<'a> ClosureOracle<'a> {
    pub fn new(cat: &'a Catalog) -> Result<Self> {
        let tables: Vec<PointTable> = certifying_fields(cat.rank)
            .iter()
            .map(|&q| PointTable::build(cat, q, DEFAULT_CENSUS_BUDGET))
            .collect::<Result<_>>()?;
        let members: Vec<Option<Vec<LaurentFraction>>> =
            cat.orbits.iter().map(|r| Space::new(r, &r.witness.constraints, &[], 1).ok().map(|s| s.member)).collect();
        let extras = cat
            .orbits
            .par_iter()
            .zip(&members)
            .map(|(r, m)| match m {
                Some(m) => extra_closure_equations(r, m, CLOSURE_DEGREE),
                None => Ok(Vec::new()),
            })
            .collect::<Result<Vec<_>>>()?;
        let on_extras = tables
            .iter()
            .map(|t: &PointTable| {
                let q = t.q();
                extras
                    .iter()
                    .map(|eqs: &Vec<LaurentPoly>| {
                        (!eqs.is_empty()).then(|| {
                            (0..t.stratum.len() as u64)
                                .into_par_iter()
                                .map(|idx| {
                                    let pt: Vec<Fp> = t.point(idx).into_iter().map(|x| Fp::from_u64(x, q)).collect();
                                    eqs.iter().all(|f| f.eval_mod_p(&pt, q).is_ok_and(|v| v.is_zero()))
                                })
                                .collect()
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(ClosureOracle { cat, tables, members, extras, on_extras })
    }

    /// All equations of the closure of stratum `j`.
    pub fn closure_equations(&self, j: usize) -> impl Iterator<Item = &LaurentPoly> {
        self.cat.orbits[j].zero_set.iter().chain(&self.extras[j])
    }

    fn symbolic(&self, i: usize, j: usize) -> Option<bool> {
        let member = self.members[i].as_ref()?;
        self.members[j].as_ref()?;
        let zero = LaurentFraction::zero(member[0].registry(), None);
        for g in self.closure_equations(j) {
            if !g.eval(member, &zero).ok()?.is_zero() {
                return Some(false);
            }
        }
        Some(true)
    }

    fn table_counterexample(&self, t: usize, i: usize, j: usize) -> Option<Vec<u64>> {
        let table = &self.tables[t];
        let extra = self.on_extras[t][j].as_deref();
        let pos = (0..table.stratum.len()).find(|&k| {
            table.stratum[k] as usize == i
                && (!table.compiled.in_closure(table.masks[k], j) || extra.is_some_and(|e| !e[k]))
        })?;
        Some(table.point(pos as u64))
    }

    /// A point of `S_i` over `F_101` where some zero generator of `j` is
    /// nonzero, taken from the general member at random letter values.
    fn sampled_counterexample(&self, i: usize, j: usize) -> Option<Counterexample> {
        let member = self.members[i].as_ref()?;
        let (ri, rj) = (&self.cat.orbits[i], &self.cat.orbits[j]);
        let p = SAMPLE_PRIME;
        let mut rng = ChaCha8Rng::seed_from_u64(0xc105e ^ (i * 131 + j) as u64);
        let nvars = member[0].registry().len();
        for _ in 0..2000 {
            let vals: Vec<Fp> = (0..nvars).map(|_| Fp::from_u64(rng.gen_range(0..p), p)).collect();
            let Some(pt) = member.iter().map(|f| eval_frac(f, &vals)).collect::<Option<Vec<Fp>>>() else { continue };
            let in_si = ri.zero_set.iter().all(|g| g.eval_mod_p(&pt, p).is_ok_and(|v| v.is_zero()))
                && ri.nonzero_set.iter().all(|g| g.eval_mod_p(&pt, p).is_ok_and(|v| !v.is_zero()));
            let outside = rj.zero_set.iter().chain(&self.extras[j]).any(|g| g.eval_mod_p(&pt, p).is_ok_and(|v| !v.is_zero()));
            if in_si && outside {
                return Some(Counterexample { q: p, point: pt.iter().map(|x| x.value()).collect() });
            }
        }
        None
    }

    pub fn leq(&self, i: usize, j: usize) -> Result<LeqDecision> {
        let symbolic = self.symbolic(i, j);
        let mut counterexample = None;
        for t in 0..self.tables.len() {
            if let Some(point) = self.table_counterexample(t, i, j) {
                counterexample = Some(Counterexample { q: self.tables[t].q(), point });
                break;
            }
        }
        let (a, b) = (&self.cat.orbits[i].id, &self.cat.orbits[j].id);
        match (symbolic, &counterexample) {
            (Some(true), Some(c)) => {
                return Err(Error::Domain(format!(
                    "closure test of {a} <= {b}: symbolic layer holds but {:?} over F_{} is a counterexample",
                    c.point, c.q
                )))
            }
            (Some(false), None) => {
                counterexample = self.sampled_counterexample(i, j);
                if counterexample.is_none() {
                    return Err(Error::Domain(format!(
                        "closure test of {a} <= {b}: symbolic layer fails but no counterexample point was found"
                    )));
                }
            }
            _ => {}
        }
        Ok(LeqDecision { holds: counterexample.is_none(), symbolic, counterexample })
    }
}

/// Convenience form of [`ClosureOracle::leq`] for a single pair.
pub fn closure_leq(cat: &Catalog, i: &str, j: &str) -> Result<LeqDecision> {
    let idx = |id: &str| cat.index_of(id).ok_or_else(|| Error::Catalog(format!("no stratum {id}")));
    ClosureOracle::new(cat)?.leq(idx(i)?, idx(j)?)
}

fn eval_frac(f: &LaurentFraction, vals: &[Fp]) -> Option<Fp> {
    let p = vals[0].modulus();
    let mut acc = f.numerator().eval_mod_p(vals, p).ok()?;
    for (d, &e) in f.den_factors() {
        acc = acc * d.eval_mod_p(vals, p).ok()?.inv()?.pow(e as u64);
    }
    Some(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonRelation {
    pub lower: String,
    pub upper: String,
    pub counterexample: Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HassePoset {
    pub rank: usize,
    /// `(id, dim)` in catalog order.
    pub nodes: Vec<(String, usize)>,
    /// `leq[i][j]` is `i <= j`.
    pub leq: Vec<Vec<bool>>,
    /// Cover relations `(lower, upper)` as node indices.
    pub covers: Vec<(usize, usize)>,
    pub non_relations: Vec<NonRelation>,
    /// Pairs decided by points alone.
    pub flagged: Vec<(String, String)>,
}

/// Full order from pairwise closure tests, then its transitive reduction.
pub fn hasse(cat: &Catalog) -> Result<HassePoset> {
    let oracle = ClosureOracle::new(cat)?;
    let k = cat.orbits.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let decisions: Vec<Result<LeqDecision>> = pairs.par_iter().map(|&(i, j)| oracle.leq(i, j)).collect();
    let mut leq = vec![vec![false; k]; k];
    let mut non_relations = Vec::new();
    let mut flagged = Vec::new();
    let id = |i: usize| cat.orbits[i].id.clone();
    for (&(i, j), d) in pairs.iter().zip(decisions) {
        let d = d?;
        leq[i][j] = d.holds;
        if d.symbolic.is_none() {
            flagged.push((id(i), id(j)));
        }
        if let Some(c) = d.counterexample {
            non_relations.push(NonRelation { lower: id(i), upper: id(j), counterexample: c });
        }
    }
    for i in 0..k {
        if !leq[i][i] {
            return Err(Error::Catalog(format!("{} is not in its own closure", id(i))));
        }
        for j in 0..k {
            if i != j && leq[i][j] && leq[j][i] {
                return Err(Error::Catalog(format!("closure cycle between {} and {}", id(i), id(j))));
            }
            for m in 0..k {
                if leq[i][j] && leq[j][m] && !leq[i][m] {
                    return Err(Error::Catalog(format!("closure order not transitive at {}, {}, {}", id(i), id(j), id(m))));
                }
            }
        }
    }
    let mut covers = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && leq[i][j] && !(0..k).any(|m| m != i && m != j && leq[i][m] && leq[m][j]) {
                covers.push((i, j));
            }
        }
    }
    Ok(HassePoset {
        rank: cat.rank,
        nodes: cat.orbits.iter().map(|r| (r.id.clone(), r.dim)).collect(),
        leq,
        covers,
        non_relations,
        flagged,
    })
}

impl HassePoset {
    pub fn index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|(n, _)| n == id)
    }

    pub fn le(&self, a: &str, b: &str) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.leq[i][j],
            _ => false,
        }
    }

    pub fn minimum(&self) -> Vec<&str> {
        let k = self.nodes.len();
        (0..k).filter(|&i| (0..k).all(|j| self.leq[i][j])).map(|i| self.nodes[i].0.as_str()).collect()
    }

    pub fn maximum(&self) -> Vec<&str> {
        let k = self.nodes.len();
        (0..k).filter(|&j| (0..k).all(|i| self.leq[i][j])).map(|j| self.nodes[j].0.as_str()).collect()
    }

    /// Cover edges as id pairs, sorted lexicographically.
    pub fn cover_ids(&self) -> Vec<(&str, &str)> {
        let mut v: Vec<(&str, &str)> =
            self.covers.iter().map(|&(a, b)| (self.nodes[a].0.as_str(), self.nodes[b].0.as_str())).collect();
        v.sort();
        v
    }

    /// Violations of the poset invariants: unique extremes and strictly
    /// increasing dimension along the order.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.minimum().len() != 1 {
            out.push(format!("minimum elements: {:?}", self.minimum()));
        }
        if self.maximum().len() != 1 {
            out.push(format!("maximum elements: {:?}", self.maximum()));
        }
        let k = self.nodes.len();
        for i in 0..k {
            for j in 0..k {
                if i != j && self.leq[i][j] && self.nodes[i].1 >= self.nodes[j].1 {
                    out.push(format!("{} <= {} without a dimension increase", self.nodes[i].0, self.nodes[j].0));
                }
            }
        }
        out
    }

    /// The order generated by the covers equals the full order, and no
    /// cover can be dropped.
    pub fn reduction_is_minimal(&self) -> bool {
        let closure = |covers: &[(usize, usize)]| {
            let k = self.nodes.len();
            let mut r = vec![vec![false; k]; k];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = true;
            }
            for &(a, b) in covers {
                r[a][b] = true;
            }
            for m in 0..k {
                for i in 0..k {
                    if r[i][m] {
                        for j in 0..k {
                            if r[m][j] {
                                r[i][j] = true;
                            }
                        }
                    }
                }
            }
            r
        };
        if closure(&self.covers) != self.leq {
            return false;
        }
        (0..self.covers.len()).all(|e| {
            let mut fewer = self.covers.clone();
            fewer.remove(e);
            closure(&fewer) != self.leq
        })
    }

    /// Graphviz text: nodes by dimension then id, one rank per dimension,
    /// edges in lexicographic order.
    pub fn emit_dot(&self) -> String {
        let mut s = format!("digraph A{} {{\n  rankdir=BT;\n  node [shape=box];\n", self.rank);
        let mut nodes: Vec<&(String, usize)> = self.nodes.iter().collect();
        nodes.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        for (id, dim) in &nodes {
            s.push_str(&format!("  \"{id}\" [label=\"{id}\\ndim {dim}\"];\n"));
        }
        let mut dims: Vec<usize> = nodes.iter().map(|n| n.1).collect();
        dims.dedup();
        for d in dims {
            let same: Vec<String> = nodes.iter().filter(|n| n.1 == d).map(|n| format!("\"{}\";", n.0)).collect();
            s.push_str(&format!("  {{ rank=same; {} }}\n", same.join(" ")));
        }
        for (a, b) in self.cover_ids() {
            s.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }

    /// `{nodes:[{id,dim}], covers:[[a,b]]}`.
    pub fn to_json(&self) -> String {
        let nodes: Vec<serde_json::Value> =
            self.nodes.iter().map(|(id, dim)| serde_json::json!({"id": id, "dim": dim})).collect();
        let covers: Vec<[&str; 2]> = self.cover_ids().into_iter().map(|(a, b)| [a, b]).collect();
        let mut s = serde_json::to_string_pretty(&serde_json::json!({"nodes": nodes, "covers": covers})).expect("json");
        s.push('\n');
        s
    }
}

/// Checks a record pair without building tables, for callers that only
/// need the symbolic verdict.
pub fn symbolic_leq(i: &OrbitRecord, j: &OrbitRecord) -> Result<bool> {
    let member = Space::new(i, &i.witness.constraints, &[], 1)?.member;
    let member_j = Space::new(j, &j.witness.constraints, &[], 1)?.member;
    let extras = extra_closure_equations(j, &member_j, CLOSURE_DEGREE)?;
    let zero = LaurentFraction::zero(member[0].registry(), None);
    for g in j.zero_set.iter().chain(&extras) {
        if !g.eval(&member, &zero)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BigRational;
    use crate::catalog::load_catalog;

    #[test]
    fn rank_two_chain_and_covers() {
        let c = load_catalog(2).unwrap();
        let p = hasse(&c).unwrap();
        assert_eq!(
            p.cover_ids(),
            vec![("0", "x12"), ("x11", "x11+x22"), ("x12", "x11"), ("x12", "x22"), ("x22", "x11+x22")]
        );
        assert!(p.invariant_violations().is_empty());
        assert!(p.reduction_is_minimal());
        assert!(p.flagged.is_empty());
    }

    #[test]
    fn incomparable_pair_has_counterexamples() {
        let c = load_catalog(2).unwrap();
        let a = closure_leq(&c, "x11", "x22").unwrap();
        let b = closure_leq(&c, "x22", "x11").unwrap();
        assert!(!a.holds && !b.holds);
        assert_eq!(a.counterexample.unwrap().point, vec![1, 0, 0]);
        assert_eq!(b.counterexample.unwrap().point, vec![0, 1, 0]);
    }

    #[test]
    fn prose_relation_in_rank_three() {
        let c = load_catalog(3).unwrap();
        assert!(closure_leq(&c, "x12+x23", "x11+x33").unwrap().holds);
        assert!(symbolic_leq(c.get("x12+x23").unwrap(), c.get("x11+x33").unwrap()).unwrap());
    }

    #[test]
    fn reducible_zero_set_is_not_the_closure() {
        let c = load_catalog(4).unwrap();
        let r = c.get("x23+x14").unwrap();
        let j = c.get("x22").unwrap();
        assert!(j.zero_set.iter().all(|g| g.eval_rational(&r.representative().coords).unwrap() == BigRational::from_integer(0.into())));
        let d = closure_leq(&c, "x23+x14", "x22").unwrap();
        assert!(!d.holds);
        assert_eq!(d.symbolic, Some(false));
        assert!(d.counterexample.is_some());
    }

    #[test]
    fn rank_four_poset_invariants() {
        let c = load_catalog(4).unwrap();
        let p = hasse(&c).unwrap();
        assert_eq!(p.nodes.len(), 61);
        assert!(p.invariant_violations().is_empty(), "{:?}", p.invariant_violations());
        assert!(p.reduction_is_minimal());
        assert!(p.flagged.is_empty());
        assert_eq!(p.non_relations.len() + p.leq.iter().flatten().filter(|&&b| b).count(), 61 * 61);
    }

    #[test]
    fn rank_one_dot() {
        let c = load_catalog(1).unwrap();
        let p = hasse(&c).unwrap();
        let dot = p.emit_dot();
        assert_eq!(dot, hasse(&c).unwrap().emit_dot());
        assert!(dot.contains("\"0\" -> \"x11\";"));
        assert_eq!(p.covers.len(), 1);
        assert!(p.to_json().contains("\"covers\""));
    }
}
