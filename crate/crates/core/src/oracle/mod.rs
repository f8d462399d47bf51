//! Ground truth independent of the catalog: `B(F_q)`-orbits on `n(F_q)` by
//! union-find, and dimensions from Jacobian ranks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::fp::{check_prime, primitive_root};
use crate::arith::{BigRational, Fp, LaurentPoly, Ring};
use crate::catalog::{Catalog, OrbitRecord};
use crate::classify::{point_index, point_of_index, CompiledCatalog};
use crate::error::{Error, Result};
use crate::lie::{conjugate, pos_roots, root_group_act, torus_act, unipotent_matrix, NilElement, TorusElement};
use crate::witness::generic_orbit_point;

/// Default point budget: all of A1 to A3 for `q <= 11` and A4 for `q <= 3`.
pub const DEFAULT_ORACLE_BUDGET: u128 = 2_000_000;

/// Largest `(q-1)^n * q^dim` for which stability is checked under every
/// torus element rather than the torus generators.
const FULL_TORUS_CHECK: u128 = 50_000_000;

/// The action of one element of `B(F_q)` on coordinates, as a sparse matrix.
#[derive(Clone, Debug)]
pub struct LinearAction {
    /// `out[k] = sum c * x[src]` over `(src, c)` in `rows[k]`.
    rows: Vec<Vec<(usize, u64)>>,
    q: u64,
}

impl LinearAction {
    /// Matrix of a linear map on `n(F_q)` from the images of basis vectors.
    pub fn from_fn(n: usize, q: u64, f: impl Fn(&NilElement<Fp>) -> Result<NilElement<Fp>>) -> Result<Self> {
        let d = pos_roots(n)?.len();
        let mut rows = vec![Vec::new(); d];
        for src in 0..d {
            let mut e = vec![Fp::zero(q); d];
            e[src] = Fp::one(q);
            let img = f(&NilElement::new(n, e)?)?;
            for (k, c) in img.coords.iter().enumerate() {
                if !c.is_zero() {
                    rows[k].push((src, c.value()));
                }
            }
        }
        Ok(LinearAction { rows, q })
    }

    pub fn apply(&self, x: &[u64], out: &mut [u64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().fold(0, |acc, &(s, c)| (acc + c * x[s]) % self.q);
        }
    }
}

fn torus_action(n: usize, q: u64, diag: &[u64]) -> Result<LinearAction> {
    let t = TorusElement { diag: diag.iter().map(|&v| Fp::from_u64(v, q)).collect() };
    LinearAction::from_fn(n, q, |x| torus_act(&t, x))
}

fn root_action(n: usize, q: u64, g: crate::lie::PosRoot, c: u64) -> Result<LinearAction> {
    let c = Fp::from_u64(c, q);
    LinearAction::from_fn(n, q, |x| Ok(root_group_act(g, &c, x)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    /// Root groups `U_g(c)` checked, over all `g` and all `c`.
    pub root_elements: usize,
    /// Torus elements checked.
    pub torus_elements: usize,
    /// Every torus element was checked, not just the generators.
    pub full_torus: bool,
}

/// `B(F_q)`-orbits on `n(F_q)`. Each class is labeled by its least point
/// index, which is also its lexicographically least point.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub rank: usize,
    pub q: u64,
    pub dim: usize,
    pub label: Vec<u32>,
    pub generators: Vec<String>,
    pub stability: StabilityReport,
}

impl OrbitPartition {
    pub fn num_points(&self) -> usize {
        self.label.len()
    }

    /// `(label, size)` sorted by label.
    pub fn classes(&self) -> Vec<(u32, u64)> {
        let mut size = vec![0u64; self.label.len()];
        for &l in &self.label {
            size[l as usize] += 1;
        }
        size.iter().enumerate().filter(|(_, &s)| s > 0).map(|(l, &s)| (l as u32, s)).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.label.iter().enumerate().filter(|(k, &l)| *k as u32 == l).count()
    }

    pub fn point(&self, idx: u32) -> Vec<u64> {
        point_of_index(idx as u64, self.q, self.dim)
    }

    /// `|B(F_q)| = (q-1)^n q^dim`, which every orbit size divides.
    pub fn group_order(&self) -> u128 {
        (self.q as u128 - 1).pow(self.rank as u32) * (self.q as u128).pow(self.dim as u32)
    }

    pub fn sizes_divide_group_order(&self) -> bool {
        let g = self.group_order();
        self.classes().iter().all(|&(_, s)| g.is_multiple_of(s as u128))
    }

    /// A point moved out of its class by `act`, if any.
    pub fn unstable_point(&self, act: &LinearAction) -> Option<(Vec<u64>, Vec<u64>)> {
        let mut pt = vec![0u64; self.dim];
        let mut img = vec![0u64; self.dim];
        for idx in 0..self.label.len() {
            if idx > 0 {
                advance(&mut pt, self.q);
            }
            act.apply(&pt, &mut img);
            if self.label[point_index(&img, self.q) as usize] != self.label[idx] {
                return Some((pt.clone(), img.clone()));
            }
        }
        None
    }

    /// Checks that `count` random elements of `B(F_q)` preserve every class.
    pub fn random_elements_preserve_classes(&self, count: usize, seed: u64) -> Result<bool> {
        let n = self.rank;
        let q = self.q;
        let d = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let t = TorusElement { diag: (0..n).map(|_| Fp::from_u64(rng.gen_range(1..q), q)).collect() };
            let u: Vec<Fp> = (0..d).map(|_| Fp::from_u64(rng.gen_range(0..q), q)).collect();
            let m = unipotent_matrix(n, &u)?;
            let act = LinearAction::from_fn(n, q, |x| torus_act(&t, &conjugate(&m, x)?))?;
            if self.unstable_point(&act).is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
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

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Orbits of `B(F_q)` on `n(F_q)` under the generators `T_k(g)`, `U_r(1)`,
/// `U_r(g)` (`g` a primitive root), certified afterwards by checking that
/// every class is stable under all root-group elements and the torus.
pub fn enumerate_borel_orbits(n: usize, q: u64, budget: u128) -> Result<OrbitPartition> {
    check_prime(q)?;
    let roots = pos_roots(n)?;
    let d = roots.len();
    let total = (q as u128).pow(d as u32);
    if total > budget {
        return Err(Error::Budget { needed: total, budget });
    }
    let g = primitive_root(q);
    let mut gens = Vec::new();
    let mut names = Vec::new();
    for k in 0..n {
        let mut diag = vec![1; n];
        diag[k] = g;
        gens.push(torus_action(n, q, &diag)?);
        names.push(format!("T{}({g})", k + 1));
    }
    for &r in &roots {
        let scalars = if g == 1 { vec![1] } else { vec![1, g] };
        for c in scalars {
            gens.push(root_action(n, q, r, c)?);
            names.push(format!("U_{}({c})", r.token()));
        }
    }

    let total = total as usize;
    let mut parent: Vec<u32> = (0..total as u32).collect();
    let mut pt = vec![0u64; d];
    let mut img = vec![0u64; d];
    for idx in 0..total {
        if idx > 0 {
            advance(&mut pt, q);
        }
        for gen in &gens {
            gen.apply(&pt, &mut img);
            let j = point_index(&img, q) as u32;
            let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, j));
            if a != b {
                // Keep the smaller index as root so roots are least points.
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let label: Vec<u32> = (0..total as u32).map(|i| find(&mut parent, i)).collect();
    let mut part = OrbitPartition {
        rank: n,
        q,
        dim: d,
        label,
        generators: names,
        stability: StabilityReport { root_elements: 0, torus_elements: 0, full_torus: false },
    };
    part.stability = certify_stability(&part)?;
    Ok(part)
}

fn certify_stability(part: &OrbitPartition) -> Result<StabilityReport> {
    let (n, q) = (part.rank, part.q);
    let mut report = StabilityReport { root_elements: 0, torus_elements: 0, full_torus: false };
    let fail = |what: String, (a, b): (Vec<u64>, Vec<u64>)| {
        Error::Domain(format!("generators are insufficient: {what} moves {a:?} to {b:?} in another class"))
    };
    for r in pos_roots(n)? {
        for c in 1..q {
            if let Some(bad) = part.unstable_point(&root_action(n, q, r, c)?) {
                return Err(fail(format!("U_{}({c})", r.token()), bad));
            }
            report.root_elements += 1;
        }
    }
    let all = (q as u128 - 1).pow(n as u32) * part.label.len() as u128;
    let tori: Vec<Vec<u64>> = if all <= FULL_TORUS_CHECK {
        report.full_torus = true;
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|v| (1..q).map(move |c| [v.clone(), vec![c]].concat())).collect();
        }
        out
    } else {
        let g = primitive_root(q);
        (0..n).map(|k| (0..n).map(|j| if j == k { g } else { 1 }).collect()).collect()
    };
    for diag in tori {
        if let Some(bad) = part.unstable_point(&torus_action(n, q, &diag)?) {
            return Err(fail(format!("T{diag:?}"), bad));
        }
        report.torus_elements += 1;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefineReport {
    pub rank: usize,
    pub q: u64,
    pub classes: usize,
    /// `(orbit id, number of rational orbits in it)` in catalog order.
    pub classes_per_stratum: Vec<(String, usize)>,
    /// Strata with points over `F_q`.
    pub strata_met: usize,
    /// Strata with no points over `F_q`; reported, not failed.
    pub empty_strata: Vec<String>,
    pub violations: Vec<String>,
}

impl RefineReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every rational orbit lies in exactly one catalog stratum, hence every
/// stratum with points is a union of rational orbits.
pub fn refine_check(cat: &Catalog, part: &OrbitPartition) -> Result<RefineReport> {
    if cat.rank != part.rank {
        return Err(Error::Domain(format!("A{} partition checked against the A{} catalog", part.rank, cat.rank)));
    }
    let c = CompiledCatalog::new(cat, part.q)?;
    let mut stratum_of_label: Vec<Option<usize>> = vec![None; part.label.len()];
    let mut violations = Vec::new();
    let mut pt = vec![0u64; part.dim];
    for idx in 0..part.label.len() {
        if idx > 0 {
            advance(&mut pt, part.q);
        }
        let s = match c.classify(&pt) {
            Ok(s) => s,
            Err(e) => {
                violations.push(e.to_string());
                continue;
            }
        };
        let l = part.label[idx] as usize;
        match stratum_of_label[l] {
            None => stratum_of_label[l] = Some(s),
            Some(t) if t != s => violations.push(format!(
                "the rational orbit of {:?} meets {} and {} at {:?}",
                part.point(l as u32),
                c.ids[t],
                c.ids[s],
                pt
            )),
            _ => {}
        }
    }
    let mut per = vec![0usize; c.ids.len()];
    for s in stratum_of_label.iter().flatten() {
        per[*s] += 1;
    }
    Ok(RefineReport {
        rank: part.rank,
        q: part.q,
        classes: part.num_classes(),
        strata_met: per.iter().filter(|&&k| k > 0).count(),
        empty_strata: c.ids.iter().zip(&per).filter(|(_, &k)| k == 0).map(|(id, _)| id.clone()).collect(),
        classes_per_stratum: c.ids.iter().cloned().zip(per).collect(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub id: String,
    /// `dim n` minus the largest Jacobian rank found.
    pub dim: usize,
    pub catalog_dim: usize,
    /// Jacobian rank of the zero generators at the representative over Q.
    pub rank_at_representative: usize,
    pub max_rank: usize,
    /// Random orbit points over F_101 that were sampled.
    pub samples: usize,
}

impl DimensionReport {
    pub fn matches(&self) -> bool {
        self.dim == self.catalog_dim
    }
}

pub const JACOBIAN_PRIME: u64 = 101;

/// `X22(X13X24 - X23X14) - X24(X22X13 - X12X23) + X23(X22X14 - X12X24)`,
/// which shows the three quadrics through the A4 orbit of `x22` are
/// algebraically dependent. Its normal form is zero.
pub fn dependency_identity_residual() -> Result<LaurentPoly> {
    let reg = crate::catalog::coordinate_registry(4)?;
    let p = |s: &str| crate::arith::parse_poly(s, &reg);
    let lhs = p("X22*(X13*X24 - X23*X14)")?;
    let rhs = p("X24*(X22*X13 - X12*X23) - X23*(X22*X14 - X12*X24)")?;
    Ok(lhs.sub(&rhs))
}

/// Dimension of a stratum from the Jacobian rank of its zero generators at
/// the representative and at random orbit points over `F_101`.
pub fn jacobian_rank_dim(rec: &OrbitRecord, samples: usize) -> Result<DimensionReport> {
    let d = pos_roots(rec.rank)?.len();
    let jac: Vec<Vec<LaurentPoly>> =
        rec.zero_set.iter().map(|f| (0..d).map(|v| f.derivative(v)).collect()).collect();
    let rep = rec.representative();
    let zero_q = BigRational::from_integer(0.into());
    let at_rep: Vec<Vec<BigRational>> = jac
        .iter()
        .map(|row| row.iter().map(|p| p.eval(&rep.coords, &zero_q)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let rank_at_representative = rank_of(at_rep);
    let mut max_rank = rank_at_representative;

    let p = JACOBIAN_PRIME;
    let (preg, poly_pt) = generic_orbit_point(rec)?;
    let n = rec.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a ^ rec.id.len() as u64);
    for _ in 0..samples {
        let params: Vec<Fp> = (0..preg.len())
            .map(|k| Fp::from_u64(if k < n { rng.gen_range(1..p) } else { rng.gen_range(0..p) }, p))
            .collect();
        let pt: Vec<Fp> = poly_pt.iter().map(|f| f.eval_mod_p(&params, p)).collect::<Result<_>>()?;
        let m: Vec<Vec<Fp>> = jac
            .iter()
            .map(|row| row.iter().map(|f| f.eval_mod_p(&pt, p)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        max_rank = max_rank.max(rank_of(m));
    }
    if max_rank > rec.zero_set.len() {
        return Err(Error::Domain(format!("Jacobian rank {max_rank} exceeds the number of generators")));
    }
    Ok(DimensionReport {
        id: rec.id.clone(),
        dim: d - max_rank,
        catalog_dim: rec.dim,
        rank_at_representative,
        max_rank,
        samples,
    })
}

/// Rank by Gaussian elimination over a field.
fn rank_of<R: Ring>(mut m: Vec<Vec<R>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&k| !m[k][c].is_zero_elem()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("nonzero pivot");
        for k in r + 1..rows {
            if !m[k][c].is_zero_elem() {
                let f = m[k][c].times(&inv);
                for j in c..cols {
                    let v = f.times(&m[r][j]);
                    m[k][j] = m[k][j].minus(&v);
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn dependency_identity_vanishes() {
        assert!(dependency_identity_residual().unwrap().is_zero());
    }

    #[test]
    fn rank_one_splits_by_squares() {
        let p = enumerate_borel_orbits(1, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(p.num_classes(), 3);
        let p = enumerate_borel_orbits(1, 2, DEFAULT_ORACLE_BUDGET).unwrap();
        assert_eq!(p.num_classes(), 2);
        assert!(p.stability.full_torus);
    }

    #[test]
    fn rank_two_refines_the_catalog() {
        let c = load_catalog(2).unwrap();
        let p = enumerate_borel_orbits(2, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        let r = refine_check(&c, &p).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.strata_met, 5);
        assert!(p.sizes_divide_group_order());
    }

    #[test]
    fn rank_one_refinement_example() {
        let c = load_catalog(1).unwrap();
        let p = enumerate_borel_orbits(1, 3, DEFAULT_ORACLE_BUDGET).unwrap();
        let r = refine_check(&c, &p).unwrap();
        assert!(r.passed());
        assert_eq!(r.classes_per_stratum, vec![("0".to_string(), 1), ("x11".to_string(), 2)]);
    }

    #[test]
    fn budget_refusal() {
        assert!(matches!(enumerate_borel_orbits(4, 5, DEFAULT_ORACLE_BUDGET), Err(Error::Budget { .. })));
    }

    #[test]
    fn dimension_examples() {
        let c4 = load_catalog(4).unwrap();
        let r = jacobian_rank_dim(c4.get("x22").unwrap(), 20).unwrap();
        assert_eq!((r.rank_at_representative, r.dim), (6, 4));
        let c1 = load_catalog(1).unwrap();
        assert_eq!(jacobian_rank_dim(c1.get("0").unwrap(), 20).unwrap().dim, 0);
        let c2 = load_catalog(2).unwrap();
        let r = jacobian_rank_dim(c2.get("x11+x22").unwrap(), 20).unwrap();
        assert_eq!((r.max_rank, r.dim), (0, 3));
    }

    #[test]
    fn labels_are_least_points() {
        let p = enumerate_borel_orbits(2, 5, DEFAULT_ORACLE_BUDGET).unwrap();
        for (i, &l) in p.label.iter().enumerate() {
            assert!(l as usize <= i && p.label[l as usize] == l);
        }
    }
}
