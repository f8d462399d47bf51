//! The inclusion `B.x ⊆ S`, checked on a fully generic Borel element.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{Fp, LaurentPoly, Registry};
use crate::catalog::OrbitRecord;
use crate::error::Result;
use crate::lie::{conjugate, pos_roots, torus_act, unipotent_matrix, TorusElement};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardReport {
    pub id: String,
    /// Zero generators that do not vanish identically on the orbit.
    pub nonvanishing_zero_generators: Vec<String>,
    /// Nonzero generators that vanish identically on the orbit.
    pub vanishing_nonzero_generators: Vec<String>,
    /// Every nonzero generator is a single monomial in the parameters,
    /// hence nonzero on the whole orbit.
    pub nonzero_generators_are_monomials: bool,
    /// Parameters `(t_1..t_n, f_1..f_k)` over F_101 where every nonzero
    /// generator is nonzero.
    pub witness_point: Option<Vec<u64>>,
}

impl ForwardReport {
    pub fn passed(&self) -> bool {
        self.nonvanishing_zero_generators.is_empty()
            && self.vanishing_nonzero_generators.is_empty()
            && self.witness_point.is_some()
    }
}

/// Orbit point `T(t) u(f) . x` with `u(f)` the generic unipotent element.
pub fn generic_orbit_point(rec: &OrbitRecord) -> Result<(std::sync::Arc<Registry>, Vec<LaurentPoly>)> {
    let n = rec.rank;
    let roots = pos_roots(n)?;
    let names: Vec<String> =
        (1..=n).map(|k| format!("t{k}")).chain(roots.iter().map(|r| format!("f{}{}", r.i, r.j))).collect();
    let reg = Registry::new(names)?;
    let f: Vec<LaurentPoly> = (0..roots.len()).map(|k| LaurentPoly::var(&reg, n + k)).collect();
    let t: Vec<LaurentPoly> = (0..n).map(|k| LaurentPoly::var(&reg, k)).collect();
    let x = rec.representative().map(|c| LaurentPoly::constant(&reg, c.clone()));
    let moved = conjugate(&unipotent_matrix(n, &f)?, &x)?;
    let y = torus_act(&TorusElement { diag: t }, &moved)?;
    Ok((reg, y.coords))
}

pub fn forward_containment(rec: &OrbitRecord) -> Result<ForwardReport> {
    let (reg, y) = generic_orbit_point(rec)?;
    let proto = LaurentPoly::zero(&reg);
    let mut report = ForwardReport {
        id: rec.id.clone(),
        nonvanishing_zero_generators: Vec::new(),
        vanishing_nonzero_generators: Vec::new(),
        nonzero_generators_are_monomials: true,
        witness_point: None,
    };
    for q in &rec.zero_set {
        if !q.eval(&y, &proto)?.is_zero() {
            report.nonvanishing_zero_generators.push(q.to_string());
        }
    }
    let mut values = Vec::new();
    for q in &rec.nonzero_set {
        let v = q.eval(&y, &proto)?;
        if v.is_zero() {
            report.vanishing_nonzero_generators.push(q.to_string());
        }
        report.nonzero_generators_are_monomials &= v.num_terms() == 1;
        values.push(v);
    }
    if report.vanishing_nonzero_generators.is_empty() {
        let p = 101;
        let n = rec.rank;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ rec.id.len() as u64);
        for _ in 0..1000 {
            let pt: Vec<Fp> = (0..reg.len())
                .map(|k| Fp::from_u64(if k < n { rng.gen_range(1..p) } else { rng.gen_range(0..p) }, p))
                .collect();
            let ok = values.iter().all(|v| v.eval_mod_p(&pt, p).map(|x| !x.is_zero()).unwrap_or(false));
            if ok {
                report.witness_point = Some(pt.iter().map(|x| x.value()).collect());
                break;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn a2_regular_orbit() {
        let c = load_catalog(2).unwrap();
        let r = forward_containment(c.get("x11+x22").unwrap()).unwrap();
        assert!(r.passed() && r.nonzero_generators_are_monomials);
    }

    #[test]
    fn a4_x22_quadrics_vanish() {
        let c = load_catalog(4).unwrap();
        let r = forward_containment(c.get("x22").unwrap()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn zero_orbit_is_trivial() {
        for n in 1..=4 {
            let c = load_catalog(n).unwrap();
            assert!(forward_containment(c.get("0").unwrap()).unwrap().passed());
        }
    }

    #[test]
    fn wrong_set_is_caught() {
        let c = load_catalog(3).unwrap();
        let mut rec = c.get("x22").unwrap().clone();
        rec.zero_set[2] = crate::arith::parse_poly("X22*X13 + X12*X23", rec.zero_set[2].registry()).unwrap();
        let r = forward_containment(&rec).unwrap();
        assert_eq!(r.nonvanishing_zero_generators.len(), 1);
    }
}
