//! Witness construction by triangular elimination.
//!
//! Starting from the general member `y = m`, coordinates outside the
//! representative's support are cleared in canonical order by root-group
//! moves `U_d(c)` that pivot on a support coordinate, after which the
//! remaining support values are matched by a torus element. Inverting the
//! moves gives `m = b.x`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::eval::{nonvanishing_letters, Atom, Space, Value, PP};
use super::{check_word_symbolic, Word};
use crate::arith::{parse_expr, LaurentFraction, LaurentPoly};
use crate::catalog::{letter_registry, Constraint, OrbitRecord, WitnessTemplate};
use crate::error::{Error, Result};
use crate::lie::{fixing_root_groups, pos_roots, root_group_act, NilElement, PosRoot};

const MAX_NODES: usize = 400;

/// Constraints expressing the general member through `dim` free letters.
///
/// Each nonlinear zero generator is solved for a letter it contains
/// linearly with a coefficient that is a monomial in nonzero letters,
/// preferring the highest root.
pub fn derive_constraints(rec: &OrbitRecord) -> Result<Vec<Constraint>> {
    let lreg = letter_registry(rec.rank)?;
    let nl = lreg.len();
    let zero_coords: BTreeSet<usize> = rec.zero_coordinates().into_iter().collect();
    let protected = nonvanishing_letters(rec)?;
    let zero = LaurentPoly::zero(&lreg);
    let vals: Vec<LaurentPoly> =
        (0..nl).map(|k| if zero_coords.contains(&k) { zero.clone() } else { LaurentPoly::var(&lreg, k) }).collect();
    let mut pending: Vec<LaurentPoly> = Vec::new();
    for p in rec.nonlinear_zero_set() {
        let q = p.eval(&vals, &zero)?;
        if !q.is_zero() {
            pending.push(q);
        }
    }
    let mut out = Vec::new();
    let mut solved = BTreeSet::new();
    while !pending.is_empty() {
        let pick = pending.iter().enumerate().find_map(|(k, f)| {
            (0..nl)
                .rev()
                .filter(|v| !solved.contains(v) && !protected.contains(v))
                .find_map(|v| linear_solution(f, v, &protected).map(|(a, b)| (k, v, a, b)))
        });
        let Some((k, v, a, b)) = pick else {
            return Err(Error::Witness(format!("no generator of {} can be solved for a free letter", rec.id)));
        };
        let f = pending.remove(k);
        solved.insert(v);
        out.push(Constraint { poly: clear_denominators(&f), solve: v });
        // v = -b / a, with a an invertible monomial.
        let value = b.neg().mul(&a.monomial_inverse().expect("monomial"));
        let mut point = vals.clone();
        point[v] = value;
        let mut next = Vec::new();
        for g in pending {
            let h = g.eval(&point, &zero)?;
            if !h.is_zero() {
                next.push(h);
            }
        }
        pending = next;
    }
    Ok(out)
}

/// `(a, b)` with `f = a v + b`, `a` a monomial in protected letters.
fn linear_solution(f: &LaurentPoly, v: usize, protected: &BTreeSet<usize>) -> Option<(LaurentPoly, LaurentPoly)> {
    let c = f.coefficients_in(v);
    if c.keys().any(|&k| k != 0 && k != 1) {
        return None;
    }
    let a = c.get(&1)?;
    let (e, _) = a.as_monomial()?;
    if e.iter().enumerate().any(|(w, &x)| x != 0 && !protected.contains(&w)) {
        return None;
    }
    Some((a.clone(), c.get(&0).cloned().unwrap_or_else(|| LaurentPoly::zero(f.registry()))))
}

fn clear_denominators(f: &LaurentPoly) -> LaurentPoly {
    let n = f.registry().len();
    let shift: Vec<i32> = (0..n).map(|v| (-f.min_degree_in(v)).max(0)).collect();
    f.mul_monomial(&shift, &BigRational::one())
}

struct Solver<'a> {
    rec: &'a OrbitRecord,
    sp: Space,
    constraints: &'a [Constraint],
    support: Vec<PosRoot>,
    fixing: Vec<PosRoot>,
    roots: Vec<PosRoot>,
    nodes: usize,
}

/// A verified witness template for the record, with constraints derived by
/// [`derive_constraints`], or `None` when elimination finds no word.
pub fn solve_witness(rec: &OrbitRecord) -> Result<Option<WitnessTemplate>> {
    let constraints = derive_constraints(rec)?;
    Ok(solve_word(rec, &constraints)?.map(|w| WitnessTemplate {
        origin: "solved".into(),
        constraints,
        radicals: Vec::new(),
        torus: w.torus.unwrap_or_default(),
        factors: w.factors,
    }))
}

/// A verified witness word for the general member, if elimination finds one.
pub fn solve_word(rec: &OrbitRecord, constraints: &[Constraint]) -> Result<Option<Word>> {
    let sp = Space::new(rec, constraints, &[], 60)?;
    let rep = rec.representative();
    let mut s = Solver {
        rec,
        support: rep.support(),
        fixing: fixing_root_groups(&rep),
        roots: pos_roots(rec.rank)?,
        constraints,
        nodes: 0,
        sp,
    };
    let y = NilElement::new(rec.rank, s.sp.member.clone())?;
    s.search(y, Vec::new())
}

impl Solver<'_> {
    fn protected(&self, f: &LaurentFraction) -> bool {
        !f.is_zero() && self.sp.unsound_atoms(&Value::Frac(f.clone()), true).is_empty()
    }

    fn search(&mut self, y: NilElement<LaurentFraction>, ops: Vec<(PosRoot, LaurentFraction)>) -> Result<Option<Word>> {
        self.nodes += 1;
        if self.nodes > MAX_NODES || ops.len() > self.roots.len() + 2 {
            return Ok(None);
        }
        let target = self.roots.iter().copied().find(|g| !self.support.contains(g) && !y.get(*g).is_zero());
        let Some(g) = target else {
            return self.finish(&y, &ops);
        };
        for &b in &self.support.clone() {
            let Some(d) = g.minus(b) else { continue };
            if self.fixing.contains(&d) || !self.protected(y.get(b)) {
                continue;
            }
            let one = LaurentFraction::constant(&self.sp.ext, BigRational::one(), None);
            let delta = root_group_act(d, &one, &y).get(g).sub(y.get(g));
            if delta.is_zero() {
                continue;
            }
            let c = y.get(g).neg().div(&delta)?;
            let next = root_group_act(d, &c, &y);
            let mut ops2 = ops.clone();
            ops2.push((d, c));
            if let Some(w) = self.search(next, ops2)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn finish(&self, y: &NilElement<LaurentFraction>, ops: &[(PosRoot, LaurentFraction)]) -> Result<Option<Word>> {
        let n = self.rec.rank;
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        let mut rhs: Vec<BTreeMap<Atom, BigRational>> = Vec::new();
        for &b in &self.support {
            let v = y.get(b);
            if !self.protected(v) {
                return Ok(None);
            }
            let mut pp = self.sp.to_pp(&Value::Frac(v.clone()));
            if !pp.coef.is_one() {
                pp.atoms.insert(Atom::Const(pp.coef.clone()), BigRational::one());
            }
            rows.push(weight_row(n, b));
            rhs.push(pp.atoms);
        }
        let Some(logs) = solve_log_system(&rows, &rhs, n) else { return Ok(None) };
        let torus: Vec<PP> = logs.into_iter().map(|atoms| PP { coef: BigRational::one(), atoms }.tidy()).collect();
        let mut factors = Vec::new();
        for (d, c) in ops {
            let w = pp_weight(&torus, *d)?;
            let mut p = self.sp.to_pp(&Value::Frac(c.clone())).mul(&w.pow(&-BigRational::one())?);
            p.coef = -p.coef;
            let Some(text) = self.sp.render_pp(&p) else { return Ok(None) };
            factors.push((*d, parse_expr(&text)?));
        }
        let trivial = torus.iter().all(|t| t.atoms.is_empty() && t.coef.is_one());
        let torus = if trivial {
            None
        } else {
            let mut exprs = Vec::new();
            for t in &torus {
                let Some(text) = self.sp.render_pp(t) else { return Ok(None) };
                exprs.push(parse_expr(&text)?);
            }
            Some(exprs)
        };
        let word = Word { torus, factors };
        let check = check_word_symbolic(self.rec, &word, self.constraints, &[], 60)?;
        Ok(check.ok().then_some(word))
    }
}

/// Exponent row of `w_b(T) = t_i / t_{j+1}` with `t_{n+1} = 1 / prod t`.
fn weight_row(n: usize, b: PosRoot) -> Vec<BigRational> {
    let mut r = vec![BigRational::zero(); n];
    r[b.i as usize - 1] += BigRational::one();
    if (b.j as usize) < n {
        r[b.j as usize] -= BigRational::one();
    } else {
        for x in r.iter_mut() {
            *x += BigRational::one();
        }
    }
    r
}

fn pp_weight(t: &[PP], d: PosRoot) -> Result<PP> {
    let one = PP::constant(BigRational::one());
    let row = weight_row(t.len(), d);
    let mut acc = one;
    for (k, e) in row.iter().enumerate() {
        if !e.is_zero() {
            acc = acc.mul(&t[k].pow(e)?);
        }
    }
    Ok(acc)
}

/// Solves `rows * a = rhs` over Q column by column of atoms; free unknowns
/// are set to zero. Returns per-unknown exponent maps.
fn solve_log_system(
    rows: &[Vec<BigRational>],
    rhs: &[BTreeMap<Atom, BigRational>],
    n: usize,
) -> Option<Vec<BTreeMap<Atom, BigRational>>> {
    let atoms: BTreeSet<Atom> = rhs.iter().flat_map(|m| m.keys().cloned()).collect();
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    let width = n + atoms.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.extend(atoms.iter().map(|a| b.get(a).cloned().unwrap_or_else(BigRational::zero)));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&k| !m[k][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for k in 0..m.len() {
            if k != r && !m[k][col].is_zero() {
                let f = m[k][col].clone();
                for c in 0..width {
                    let v = &m[r][c] * &f;
                    m[k][c] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| row[n..].iter().any(|x| !x.is_zero())) {
        return None;
    }
    let mut out = vec![BTreeMap::new(); n];
    for (k, &col) in pivots.iter().enumerate() {
        for (a, atom) in atoms.iter().enumerate() {
            let v = &m[k][n + a];
            if !v.is_zero() {
                out[col].insert(atom.clone(), v.clone());
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn a3_constraints_solve_the_highest_root() {
        let c = load_catalog(3).unwrap();
        let cons = derive_constraints(c.get("x22").unwrap()).unwrap();
        assert_eq!(cons.len(), 1);
        assert_eq!(cons[0].poly.registry().name(cons[0].solve), "z");
    }

    #[test]
    fn solver_handles_a3() {
        let c = load_catalog(3).unwrap();
        for rec in &c.orbits {
            assert!(solve_witness(rec).unwrap().is_some(), "{}", rec.id);
        }
    }

    #[test]
    fn rank_one_needs_a_square_root() {
        let c = load_catalog(1).unwrap();
        let t = solve_witness(c.get("x11").unwrap()).unwrap().unwrap();
        assert_eq!(t.torus[0].to_string(), "z^(1/2)");
        assert!(t.factors.is_empty());
    }

    #[test]
    fn high_root_is_torus_reachable() {
        let c = load_catalog(2).unwrap();
        let t = solve_witness(c.get("x12").unwrap()).unwrap().unwrap();
        assert!(t.factors.is_empty() && t.torus.len() == 2);
    }

    #[test]
    fn solved_words_avoid_fixing_root_groups() {
        let c = load_catalog(4).unwrap();
        for id in ["x22+x44", "x44+x23", "x11+x22+x44"] {
            let rec = c.get(id).unwrap();
            let fixing = fixing_root_groups(&rec.representative());
            let t = solve_witness(rec).unwrap().unwrap();
            assert!(t.factors.iter().all(|(r, _)| !fixing.contains(r)), "{id}");
        }
    }
}
