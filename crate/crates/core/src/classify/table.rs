//! Exhaustive classification over `F_q`.
//!
//! Points are indexed in mixed radix with the first coordinate most
//! significant, so index order is lexicographic order of points.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Fp;
use crate::catalog::Catalog;
use crate::error::{Error, Result};

/// Largest number of points a census visits without an explicit budget.
pub const DEFAULT_CENSUS_BUDGET: u128 = 10_000_000;

const CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug)]
struct CompiledPoly {
    /// `(coefficient, [(coordinate, exponent)])`.
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn is_zero_at(&self, pt: &[u64], q: u64) -> bool {
        let mut acc = 0u64;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, e) in mono {
                let x = pt[v];
                if x == 0 {
                    t = 0;
                    break;
                }
                for _ in 0..e {
                    t = t * x % q;
                }
            }
            acc = (acc + t) % q;
        }
        acc == 0
    }
}

/// The catalog of one rank reduced mod `q`: each distinct generator is a
/// bit, each stratum a pair of masks.
#[derive(Clone, Debug)]
pub struct CompiledCatalog {
    pub rank: usize,
    pub q: u64,
    /// Number of coordinates.
    pub dim: usize,
    pub ids: Vec<String>,
    polys: Vec<CompiledPoly>,
    zero: Vec<u64>,
    nonzero: Vec<u64>,
}

impl CompiledCatalog {
    pub fn new(cat: &Catalog, q: u64) -> Result<Self> {
        crate::arith::fp::check_prime(q)?;
        let mut keys: Vec<String> = Vec::new();
        let mut polys = Vec::new();
        let mut bit = |p: &crate::arith::LaurentPoly| -> Result<u64> {
            let key = p.to_string();
            if let Some(k) = keys.iter().position(|s| *s == key) {
                return Ok(1 << k);
            }
            if keys.len() == 64 {
                return Err(Error::Domain("more than 64 distinct generators".into()));
            }
            let mut terms = Vec::new();
            for (e, c) in p.terms() {
                let c = Fp::from_rational(c, q)
                    .ok_or_else(|| Error::Domain(format!("coefficient of {p} is undefined mod {q}")))?;
                let mono = e.iter().enumerate().filter(|(_, &x)| x != 0).map(|(v, &x)| (v, x as u32)).collect();
                terms.push((c.value(), mono));
            }
            keys.push(key);
            polys.push(CompiledPoly { terms });
            Ok(1 << (keys.len() - 1))
        };
        let mut zero = Vec::new();
        let mut nonzero = Vec::new();
        for rec in &cat.orbits {
            let mut z = 0;
            for p in &rec.zero_set {
                z |= bit(p)?;
            }
            let mut nz = 0;
            for p in &rec.nonzero_set {
                nz |= bit(p)?;
            }
            zero.push(z);
            nonzero.push(nz);
        }
        let dim = crate::lie::pos_roots(cat.rank)?.len();
        Ok(CompiledCatalog { rank: cat.rank, q, dim, ids: cat.orbits.iter().map(|r| r.id.clone()).collect(), polys, zero, nonzero })
    }

    /// Bit `k` is set when generator `k` vanishes at `pt`.
    pub fn zero_mask(&self, pt: &[u64]) -> u64 {
        let mut m = 0;
        for (k, p) in self.polys.iter().enumerate() {
            if p.is_zero_at(pt, self.q) {
                m |= 1 << k;
            }
        }
        m
    }

    pub fn in_stratum(&self, mask: u64, rec: usize) -> bool {
        mask & self.zero[rec] == self.zero[rec] && mask & self.nonzero[rec] == 0
    }

    /// A point with this mask lies in the closure `Z(zero_set)` of `rec`.
    pub fn in_closure(&self, mask: u64, rec: usize) -> bool {
        mask & self.zero[rec] == self.zero[rec]
    }

    pub fn matches(&self, mask: u64) -> Vec<usize> {
        (0..self.ids.len()).filter(|&k| self.in_stratum(mask, k)).collect()
    }

    /// The unique stratum of `pt`, or an exhaustion/disjointness error.
    pub fn classify(&self, pt: &[u64]) -> Result<usize> {
        let hits = self.matches(self.zero_mask(pt));
        let point = || pt.iter().map(|x| x.to_string()).collect();
        match hits.as_slice() {
            [k] => Ok(*k),
            [] => Err(Error::Exhaustion(point())),
            many => Err(Error::Disjointness { point: point(), ids: many.iter().map(|&k| self.ids[k].clone()).collect() }),
        }
    }

    pub fn num_points(&self) -> u128 {
        (self.q as u128).pow(self.dim as u32)
    }
}

pub fn point_index(pt: &[u64], q: u64) -> u64 {
    pt.iter().fold(0, |acc, &x| acc * q + x)
}

pub fn point_of_index(mut idx: u64, q: u64, dim: usize) -> Vec<u64> {
    let mut pt = vec![0; dim];
    for k in (0..dim).rev() {
        pt[k] = idx % q;
        idx /= q;
    }
    pt
}

fn advance(pt: &mut [u64], q: u64) {
    for x in pt.iter_mut().rev() {
        *x += 1;
        if *x < q {
            return;
        }
        *x = 0;
    }
}

/// Runs `f(index, point)` over `[start, end)` in order.
fn for_range(start: u64, end: u64, q: u64, dim: usize, mut f: impl FnMut(u64, &[u64]) -> Result<()>) -> Result<()> {
    let mut pt = point_of_index(start, q, dim);
    for idx in start..end {
        f(idx, &pt)?;
        advance(&mut pt, q);
    }
    Ok(())
}

fn check_budget(c: &CompiledCatalog, budget: u128) -> Result<u64> {
    let needed = c.num_points();
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(needed as u64)
}

/// Number of points of `n(F_q)` in each stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub rank: usize,
    pub q: u64,
    pub total: u64,
    /// `(orbit id, count)` in catalog order.
    pub counts: Vec<(String, u64)>,
}

impl Census {
    pub fn nonempty(&self) -> usize {
        self.counts.iter().filter(|(_, c)| *c > 0).count()
    }

    pub fn empty_strata(&self) -> Vec<&str> {
        self.counts.iter().filter(|(_, c)| *c == 0).map(|(id, _)| id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<u64> {
        self.counts.iter().find(|(k, _)| k == id).map(|(_, c)| *c)
    }

    /// CSV with columns `orbit_id,q,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("orbit_id,q,count\n");
        for (id, c) in &self.counts {
            s.push_str(&format!("{id},{},{c}\n", self.q));
        }
        s
    }
}

/// Classifies every point of `n(F_q)`; fails on the first point (in index
/// order) that lies in no stratum or in two.
pub fn partition_census(cat: &Catalog, q: u64, budget: u128) -> Result<Census> {
    let c = CompiledCatalog::new(cat, q)?;
    let total = check_budget(&c, budget)?;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let parts: Vec<Result<Vec<u64>>> = chunks
        .par_iter()
        .map(|&k| {
            let mut counts = vec![0u64; c.ids.len()];
            for_range(k * CHUNK, ((k + 1) * CHUNK).min(total), q, c.dim, |_, pt| {
                counts[c.classify(pt)?] += 1;
                Ok(())
            })?;
            Ok(counts)
        })
        .collect();
    let mut counts = vec![0u64; c.ids.len()];
    for part in parts {
        for (a, b) in counts.iter_mut().zip(part?) {
            *a += b;
        }
    }
    Ok(Census { rank: cat.rank, q, total, counts: c.ids.iter().cloned().zip(counts).collect() })
}

/// Zero masks and strata of every point of `n(F_q)`, for repeated queries.
#[derive(Clone, Debug)]
pub struct PointTable {
    pub compiled: CompiledCatalog,
    pub masks: Vec<u64>,
    pub stratum: Vec<u16>,
}

impl PointTable {
    pub fn build(cat: &Catalog, q: u64, budget: u128) -> Result<Self> {
        let compiled = CompiledCatalog::new(cat, q)?;
        let total = check_budget(&compiled, budget)?;
        let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
        let parts: Vec<Result<(Vec<u64>, Vec<u16>)>> = chunks
            .par_iter()
            .map(|&k| {
                let (start, end) = (k * CHUNK, ((k + 1) * CHUNK).min(total));
                let mut masks = Vec::with_capacity((end - start) as usize);
                let mut stratum = Vec::with_capacity((end - start) as usize);
                for_range(start, end, q, compiled.dim, |_, pt| {
                    stratum.push(compiled.classify(pt)? as u16);
                    masks.push(compiled.zero_mask(pt));
                    Ok(())
                })?;
                Ok((masks, stratum))
            })
            .collect();
        let mut masks = Vec::with_capacity(total as usize);
        let mut stratum = Vec::with_capacity(total as usize);
        for part in parts {
            let (m, s) = part?;
            masks.extend(m);
            stratum.extend(s);
        }
        Ok(PointTable { compiled, masks, stratum })
    }

    pub fn q(&self) -> u64 {
        self.compiled.q
    }

    pub fn point(&self, idx: u64) -> Vec<u64> {
        point_of_index(idx, self.compiled.q, self.compiled.dim)
    }

    /// First point (in index order) of stratum `i` outside the closure of
    /// stratum `j`, if any.
    pub fn closure_counterexample(&self, i: usize, j: usize) -> Option<Vec<u64>> {
        let pos = self
            .stratum
            .iter()
            .zip(&self.masks)
            .position(|(&s, &m)| s as usize == i && !self.compiled.in_closure(m, j))?;
        Some(self.point(pos as u64))
    }

    /// For each stratum, the AND of the zero masks of its points
    /// (all ones for strata with no points over this field).
    pub fn stratum_and_masks(&self) -> Vec<u64> {
        let mut out = vec![u64::MAX; self.compiled.ids.len()];
        for (&s, &m) in self.stratum.iter().zip(&self.masks) {
            out[s as usize] &= m;
        }
        out
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut out = vec![0; self.compiled.ids.len()];
        for &s in &self.stratum {
            out[s as usize] += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn rank_one_census() {
        let c = load_catalog(1).unwrap();
        for q in [2, 3, 7] {
            let census = partition_census(&c, q, DEFAULT_CENSUS_BUDGET).unwrap();
            assert_eq!(census.get("0"), Some(1));
            assert_eq!(census.get("x11"), Some(q - 1));
        }
    }

    #[test]
    fn rank_two_over_f3() {
        let c = load_catalog(2).unwrap();
        let census = partition_census(&c, 3, DEFAULT_CENSUS_BUDGET).unwrap();
        let want = [("0", 1), ("x12", 2), ("x11", 6), ("x22", 6), ("x11+x22", 12)];
        for (id, n) in want {
            assert_eq!(census.get(id), Some(n), "{id}");
        }
        assert_eq!(census.total, 27);
        assert!(census.to_csv().starts_with("orbit_id,q,count\n"));
    }

    #[test]
    fn rank_three_over_f2() {
        let c = load_catalog(3).unwrap();
        let census = partition_census(&c, 2, DEFAULT_CENSUS_BUDGET).unwrap();
        assert_eq!(census.nonempty(), 16);
        assert_eq!(census.counts.iter().map(|(_, c)| c).sum::<u64>(), 64);
    }

    #[test]
    fn budget_is_enforced() {
        let c = load_catalog(4).unwrap();
        let e = partition_census(&c, 5, 1000).unwrap_err();
        assert!(matches!(e, Error::Budget { needed: 9765625, budget: 1000 }));
    }

    #[test]
    fn index_round_trip() {
        let pt = vec![2, 0, 1, 4, 3, 0];
        assert_eq!(point_of_index(point_index(&pt, 5), 5, 6), pt);
    }

    #[test]
    fn table_agrees_with_census() {
        let c = load_catalog(3).unwrap();
        let t = PointTable::build(&c, 3, DEFAULT_CENSUS_BUDGET).unwrap();
        let census = partition_census(&c, 3, DEFAULT_CENSUS_BUDGET).unwrap();
        let counts: Vec<u64> = census.counts.iter().map(|(_, n)| *n).collect();
        assert_eq!(t.counts(), counts);
    }
}
