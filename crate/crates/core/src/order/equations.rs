//! Low-degree equations of an orbit closure beyond the zero set.
//!
//! `Z(zero_set)` can be reducible, with components that miss the stratum.
//! Polynomials vanishing on the general member are found by interpolation
//! over a large prime, lifted to small rationals, and kept only when they
//! vanish on the general member exactly and are not already multiples of
//! the zero generators in the same degree.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{BigRational, Fp, LaurentFraction, LaurentPoly};
use crate::catalog::{coordinate_registry, OrbitRecord};
use crate::error::{Error, Result};

const P: u64 = 2_147_483_647;

/// Degree bound for interpolated closure equations.
pub const CLOSURE_DEGREE: u32 = 3;

fn inv(a: u64) -> u64 {
    Fp::from_u64(a, P).inv().expect("nonzero").value()
}

/// Monomials in `vars` of total degree `1..=deg`, lexicographically.
fn monomials(vars: &[usize], deg: u32, width: usize) -> Vec<Vec<i32>> {
    fn go(vars: &[usize], left: u32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        let Some((&v, rest)) = vars.split_first() else {
            out.push(cur.clone());
            return;
        };
        for e in 0..=left {
            cur[v] = e as i32;
            go(rest, left - e, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    go(vars, deg, &mut vec![0; width], &mut out);
    out.retain(|m| m.iter().any(|&e| e > 0));
    out.sort();
    out
}

/// Row echelon basis over `F_P` with pivots kept in insertion order.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    /// Inserts `v` and reports whether it enlarged the span.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (p, r) in &self.rows {
            let f = v[*p];
            if f != 0 {
                for (a, b) in v.iter_mut().zip(r) {
                    *a = (*a + P - f * b % P) % P;
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else { return false };
        let s = inv(v[p]);
        v.iter_mut().for_each(|x| *x = *x * s % P);
        self.rows.push((p, v));
        true
    }
}

/// Null space basis of `rows` (each of length `cols`), one vector per
/// non-pivot column of the reduced echelon form.
fn kernel(mut rows: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, k);
        let s = inv(rows[r][c]);
        rows[r].iter_mut().for_each(|x| *x = *x * s % P);
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            let f = row[c];
            if k != r && f != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a = (*a + P - f * b % P) % P;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; cols];
        v[f] = 1;
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = (P - rows[row][f]) % P;
        }
        out.push(v);
    }
    out
}

/// Smallest `a/b` congruent to `x` with `|a|, |b|` below `sqrt(P/2)`.
fn reconstruct(x: u64) -> Option<BigRational> {
    let bound = ((P / 2) as f64).sqrt() as i64;
    let (mut r0, mut r1) = (P as i64, x as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    Some(BigRational::new(BigInt::from(r1), BigInt::from(t1)))
}

fn eval_frac(f: &LaurentFraction, vals: &[Fp]) -> Option<Fp> {
    let mut acc = f.numerator().eval_mod_p(vals, P).ok()?;
    for (d, &e) in f.den_factors() {
        acc = acc * d.eval_mod_p(vals, P).ok()?.inv()?.pow(e as u64);
    }
    Some(acc)
}

/// Closure equations of `rec` of degree at most `deg` that are not
/// multiples of its zero generators in that degree. `member` is the
/// general member of the stratum.
pub fn extra_closure_equations(rec: &OrbitRecord, member: &[LaurentFraction], deg: u32) -> Result<Vec<LaurentPoly>> {
    let reg = coordinate_registry(rec.rank)?;
    let width = reg.len();
    let zero = rec.zero_coordinates();
    let vars: Vec<usize> = (0..width).filter(|v| !zero.contains(v)).collect();
    let monos = monomials(&vars, deg, width);
    let col = |e: &[i32]| monos.binary_search_by(|m| m.as_slice().cmp(e)).ok();
    if monos.is_empty() {
        return Ok(Vec::new());
    }

    let nvars = member[0].registry().len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a7 ^ rec.id.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64)));
    let mut rows = Vec::new();
    let mut tries = 0;
    while rows.len() < monos.len() + 12 {
        tries += 1;
        if tries > 20 * (monos.len() + 12) {
            return Err(Error::Domain(format!("{}: too few sample points on the general member", rec.id)));
        }
        let vals: Vec<Fp> = (0..nvars).map(|_| Fp::from_u64(rng.gen_range(1..P), P)).collect();
        let Some(pt) = member.iter().map(|f| eval_frac(f, &vals)).collect::<Option<Vec<Fp>>>() else { continue };
        if rec.nonzero_set.iter().any(|g| g.eval_mod_p(&pt, P).map_or(true, |v| v.is_zero())) {
            continue;
        }
        let pv: Vec<u64> = pt.iter().map(|x| x.value()).collect();
        rows.push(monos.iter().map(|m| m.iter().zip(&pv).fold(1u64, |a, (&e, &x)| a * Fp::from_u64(x, P).pow(e as u64).value() % P)).collect());
    }

    // Multiples of the zero generators already known in this degree.
    let mut span = Echelon::default();
    for g in rec.zero_set.iter().filter(|g| !zero.iter().any(|&z| **g == LaurentPoly::var(&reg, z))) {
        let mut restricted = Vec::new();
        for (e, c) in g.terms() {
            if zero.iter().all(|&z| e[z] == 0) {
                restricted.push((e.clone(), c.clone()));
            }
        }
        for shift in std::iter::once(vec![0; width]).chain(monos.iter().cloned()) {
            let mut v = vec![0u64; monos.len()];
            let ok = restricted.iter().all(|(e, c)| {
                let m: Vec<i32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
                let Some(k) = col(&m) else { return false };
                let Some(c) = Fp::from_rational(c, P) else { return false };
                v[k] = (v[k] + c.value()) % P;
                true
            });
            if ok {
                span.insert(v);
            }
        }
    }

    let degree = |v: &Vec<u64>| (0..v.len()).filter(|&k| v[k] != 0).map(|k| monos[k].iter().sum::<i32>()).max().unwrap_or(0);
    let mut basis = kernel(rows, monos.len());
    basis.sort_by_key(|v| degree(v));
    let mut out = Vec::new();
    for v in basis {
        if !span.insert(v.clone()) {
            continue;
        }
        for shift in &monos {
            let mut w = vec![0u64; monos.len()];
            let fits = (0..v.len()).filter(|&k| v[k] != 0).all(|k| {
                let m: Vec<i32> = monos[k].iter().zip(shift).map(|(a, b)| a + b).collect();
                col(&m).map(|c| w[c] = v[k]).is_some()
            });
            if fits {
                span.insert(w);
            }
        }
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Ok((monos[k].clone(), reconstruct(c).ok_or_else(|| lift_error(rec))?)))
            .collect::<Result<Vec<_>>>()?;
        let f = LaurentPoly::from_terms(&reg, terms);
        let z = LaurentFraction::zero(member[0].registry(), None);
        if !f.eval(member, &z)?.is_zero() {
            return Err(lift_error(rec));
        }
        out.push(f);
    }
    Ok(out)
}

fn lift_error(rec: &OrbitRecord) -> Error {
    Error::Domain(format!("{}: an interpolated closure equation does not lift to an exact one", rec.id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;
    use crate::witness::eval::Space;

    fn extras(n: usize, id: &str) -> Vec<String> {
        let c = load_catalog(n).unwrap();
        let r = c.get(id).unwrap();
        let m = Space::new(r, &r.witness.constraints, &[], 1).unwrap().member;
        extra_closure_equations(r, &m, CLOSURE_DEGREE).unwrap().iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn reducible_zero_set_gains_a_minor() {
        let e = extras(4, "x22");
        assert_eq!(e.len(), 1, "{e:?}");
        let c = load_catalog(4).unwrap();
        let reg = coordinate_registry(4).unwrap();
        let f = crate::arith::parse_poly(&e[0], &reg).unwrap();
        let minor = crate::arith::parse_poly("X13*X24 - X14*X23", &reg).unwrap();
        assert!(f == minor || f == minor.neg(), "{f}");
        assert!(c.get("x22").is_some());
    }

    #[test]
    fn rank_two_closures_are_zero_sets() {
        for id in ["0", "x12", "x11", "x22", "x11+x22"] {
            assert!(extras(2, id).is_empty(), "{id}");
        }
    }
}
