//! Membership in catalog strata and the classification of points.
//!
//! [`member`] and [`classify`] work over any field scalar. Exhaustive work
//! over `F_q` goes through [`CompiledCatalog`], which evaluates the
//! distinct generators of a rank once per point and matches strata by bit
//! masks.

mod table;

use std::fmt::Display;

use serde::Serialize;

use crate::arith::{BigRational, Fp, Ring};
use crate::catalog::{Catalog, OrbitRecord};
use crate::error::{Error, Result};
use crate::lie::NilElement;

pub use table::{partition_census, point_index, point_of_index, Census, CompiledCatalog, PointTable, DEFAULT_CENSUS_BUDGET};

/// Scalars a point may have: exact field elements only.
pub trait FieldScalar: Ring + Display {}
impl FieldScalar for Fp {}
impl FieldScalar for BigRational {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub orbit_id: String,
    pub zero_conditions: usize,
    pub nonzero_conditions: usize,
}

/// `m` lies in `Z(zero_set) ∩ V(nonzero_set)`.
pub fn member<R: FieldScalar>(rec: &OrbitRecord, m: &NilElement<R>) -> Result<bool> {
    if m.n != rec.rank {
        return Err(Error::Point(format!("point of A{} tested against an A{} stratum", m.n, rec.rank)));
    }
    let proto = m.coords[0].zero_like();
    for q in &rec.zero_set {
        if !q.eval(&m.coords, &proto)?.is_zero_elem() {
            return Ok(false);
        }
    }
    for q in &rec.nonzero_set {
        if q.eval(&m.coords, &proto)?.is_zero_elem() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique stratum containing `m`. Every record is tested, so a
/// corrupted catalog surfaces as an exhaustion or disjointness error.
pub fn classify<R: FieldScalar>(cat: &Catalog, m: &NilElement<R>) -> Result<ClassificationResult> {
    if m.n != cat.rank {
        return Err(Error::Point(format!("point of A{} given to the A{} catalog", m.n, cat.rank)));
    }
    let mut order: Vec<usize> = (0..cat.orbits.len()).collect();
    order.sort_by_key(|&k| cat.orbits[k].dim);
    let mut hits = Vec::new();
    for k in order {
        if member(&cat.orbits[k], m)? {
            hits.push(k);
        }
    }
    let point = || m.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    match hits.as_slice() {
        [] => Err(Error::Exhaustion(point())),
        [k] => {
            let rec = &cat.orbits[*k];
            Ok(ClassificationResult {
                orbit_id: rec.id.clone(),
                zero_conditions: rec.zero_set.len(),
                nonzero_conditions: rec.nonzero_set.len(),
            })
        }
        many => Err(Error::Disjointness { point: point(), ids: many.iter().map(|&k| cat.orbits[k].id.clone()).collect() }),
    }
}

/// Parses `a,b,c,...` in canonical root order, over `F_p` when a modulus is
/// given and over the rationals otherwise.
pub fn parse_point_rational(text: &str, n: usize) -> Result<NilElement<BigRational>> {
    let coords = split_point(text)?
        .iter()
        .map(|s| {
            let r = crate::arith::parse_expr(s)?
                .const_value()
                .ok_or_else(|| Error::Point(format!("`{s}` is not a number; symbolic points are not classified")))?;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    NilElement::new(n, coords)
}

pub fn parse_point_mod(text: &str, n: usize, p: u64) -> Result<NilElement<Fp>> {
    crate::arith::fp::check_prime(p)?;
    let coords = split_point(text)?
        .iter()
        .map(|s| {
            let v: i64 = s.parse().map_err(|_| Error::Point(format!("`{s}` is not an integer")))?;
            Ok(Fp::new(v, p))
        })
        .collect::<Result<Vec<_>>>()?;
    NilElement::new(n, coords)
}

/// Strata are cones: `classify(λ m) = classify(m)` for `λ != 0`. Checks
/// `pairs` random `(λ, m)` over `F_p` and returns the first failure.
pub fn scaling_failure(cat: &Catalog, p: u64, pairs: usize, seed: u64) -> Result<Option<String>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let m = crate::lie::laws::random_nil(cat.rank, p, &mut rng)?;
        let lambda = Fp::from_u64(rng.gen_range(1..p), p);
        let a = classify(cat, &m)?.orbit_id;
        let b = classify(cat, &m.map(|c| *c * lambda))?.orbit_id;
        if a != b {
            let pt: Vec<String> = m.coords.iter().map(|c| c.to_string()).collect();
            return Ok(Some(format!("({}) is in {a} but {lambda} times it is in {b}", pt.join(","))));
        }
    }
    Ok(None)
}

fn split_point(text: &str) -> Result<Vec<String>> {
    let parts: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    if parts.iter().any(String::is_empty) {
        return Err(Error::Point(format!("empty coordinate in `{text}`")));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn membership_examples() {
        let c1 = load_catalog(1).unwrap();
        let z = parse_point_rational("3", 1).unwrap();
        assert!(member(c1.get("x11").unwrap(), &z).unwrap());
        let c2 = load_catalog(2).unwrap();
        let m = parse_point_rational("2,0,-1", 2).unwrap();
        assert!(member(c2.get("x11").unwrap(), &m).unwrap());
        let zero = parse_point_rational("0,0,0", 2).unwrap();
        assert!(!member(c2.get("x11").unwrap(), &zero).unwrap());
        assert!(member(c2.get("x11").unwrap(), &z).is_err());
    }

    #[test]
    fn classification_examples() {
        let c2 = load_catalog(2).unwrap();
        assert_eq!(classify(&c2, &parse_point_mod("0,0,5", 2, 7).unwrap()).unwrap().orbit_id, "x12");
        let c3 = load_catalog(3).unwrap();
        assert_eq!(classify(&c3, &parse_point_mod("0,1,0,1,1,1", 3, 5).unwrap()).unwrap().orbit_id, "x22");
        let c4 = load_catalog(4).unwrap();
        assert_eq!(classify(&c4, &parse_point_rational("0,0,0,0,0,0,0,0,0,0", 4).unwrap()).unwrap().orbit_id, "0");
    }

    #[test]
    fn symbolic_points_are_rejected() {
        assert!(parse_point_rational("x,0,1", 2).is_err());
        assert!(parse_point_mod("1,2", 2, 7).is_err());
    }

    #[test]
    fn strata_are_cones() {
        for n in 1..=4 {
            assert_eq!(scaling_failure(&load_catalog(n).unwrap(), 101, 100, 7).unwrap(), None);
        }
    }

    #[test]
    fn corrupted_catalog_is_reported() {
        let mut c2 = load_catalog(2).unwrap();
        let k = c2.index_of("x12").unwrap();
        c2.orbits.remove(k);
        let e = classify(&c2, &parse_point_mod("0,0,1", 2, 7).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Exhaustion(_)), "{e}");
    }
}
