//! Verification at random points over a prime field.
//!
//! Letters are sampled through their reparametrization variables, so a
//! letter that only occurs under a `k`-th root is sampled as a `k`-th power.
//! Radicals are then given a random root of their evaluated radicand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{gcd_i32, Space};
use super::Word;
use crate::arith::fp::{check_prime, roots_of};
use crate::arith::{Fp, LaurentFraction, LaurentPoly};
use crate::catalog::{Constraint, OrbitRecord, RadicalSpec};
use crate::error::Result;
use crate::lie::{conjugate, BorelWord, NilElement, RootGroupFactor, TorusElement};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NumericOutcome {
    pub passed: usize,
    pub failed: usize,
    /// Samples discarded because a required root did not exist.
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl NumericOutcome {
    pub fn all_passed(&self, trials: usize) -> bool {
        self.failed == 0 && self.passed == trials
    }
}

pub fn check_word_numeric(
    rec: &OrbitRecord,
    word: &Word,
    constraints: &[Constraint],
    radicals: &[RadicalSpec],
    p: u64,
    trials: usize,
    seed: u64,
) -> Result<NumericOutcome> {
    check_prime(p)?;
    let sp = Space::new(rec, constraints, radicals, 60)?;
    let torus: Option<Vec<LaurentFraction>> = match &word.torus {
        Some(t) => Some(t.iter().map(|e| sp.lower(&sp.eval(e)?)).collect::<Result<_>>()?),
        None => None,
    };
    let params: Vec<LaurentFraction> =
        word.factors.iter().map(|(_, e)| sp.lower(&sp.eval(e)?)).collect::<Result<_>>()?;
    let radicands: Vec<LaurentPoly> = sp.tower()?.relations().iter().map(|r| r.radicand.clone()).collect();

    // Largest compression of each variable compatible with every exponent.
    let big_n = sp.big_n;
    let mut g = vec![big_n; sp.ext.len()];
    let mut absorb = |q: &LaurentPoly| {
        for e in q.terms().keys() {
            for (v, &x) in e.iter().enumerate() {
                g[v] = gcd_i32(g[v], x);
            }
        }
    };
    let fracs = torus.iter().flatten().chain(&params).chain(&sp.member);
    for f in fracs {
        absorb(f.numerator());
        f.den_factors().keys().for_each(&mut absorb);
    }
    radicands.iter().for_each(&mut absorb);

    let rep = rec.representative().map(|c| Fp::from_rational(c, p).expect("0/1 entries"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let mut out = NumericOutcome::default();
    let budget = trials.saturating_mul(200).max(1000);
    let mut attempts = 0;
    while out.passed + out.failed < trials {
        attempts += 1;
        if attempts > budget {
            break;
        }
        let mut vals = vec![Fp::zero(p); sp.ext.len()];
        for &v in &sp.free_letters {
            vals[v] = Fp::from_u64(rng.gen_range(0..p), p);
        }
        let Some(m) = sp.member.iter().map(|f| eval_frac(f, &vals, &g)).collect::<Option<Vec<Fp>>>() else {
            out.skipped += 1;
            continue;
        };
        if !in_set(rec, &m, p)? {
            out.skipped += 1;
            continue;
        }
        let mut rooted = true;
        for (k, r) in radicands.iter().enumerate() {
            let v = sp.nl + k;
            let Some(a) = eval_poly(r, &vals, &g) else {
                rooted = false;
                break;
            };
            let roots = roots_of(a, (big_n / g[v]) as u32);
            if a.is_zero() || roots.is_empty() {
                rooted = false;
                break;
            }
            vals[v] = roots[rng.gen_range(0..roots.len())];
        }
        if !rooted {
            out.skipped += 1;
            continue;
        }
        match trial(rec, &torus, &params, word, &vals, &g, &rep, &m) {
            Ok(()) => out.passed += 1,
            Err(msg) => {
                out.failed += 1;
                if out.first_failure.is_none() {
                    let pt: Vec<String> = m.iter().map(|x| x.value().to_string()).collect();
                    out.first_failure = Some(format!("p={p}, m=({}): {msg}", pt.join(",")));
                }
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn trial(
    rec: &OrbitRecord,
    torus: &Option<Vec<LaurentFraction>>,
    params: &[LaurentFraction],
    word: &Word,
    vals: &[Fp],
    g: &[i32],
    rep: &NilElement<Fp>,
    m: &[Fp],
) -> std::result::Result<(), String> {
    let p = m[0].modulus();
    let diag = match torus {
        Some(t) => Some(
            t.iter()
                .map(|f| eval_frac(f, vals, g).filter(|x| !x.is_zero()))
                .collect::<Option<Vec<Fp>>>()
                .ok_or("torus entry is zero or undefined")?,
        ),
        None => None,
    };
    let mut factors = Vec::new();
    for (f, (root, _)) in params.iter().zip(&word.factors) {
        let c = eval_frac(f, vals, g).ok_or_else(|| format!("parameter of U_{} has a zero denominator", root.token()))?;
        factors.push(RootGroupFactor { root: *root, param: c });
    }
    let b = BorelWord { n: rec.rank, torus: diag.map(|diag| TorusElement { diag }), factors };
    let mat = b.to_matrix(&Fp::one(p)).map_err(|e| e.to_string())?;
    let got = conjugate(&mat, rep).map_err(|e| e.to_string())?;
    let roots = crate::lie::pos_roots(rec.rank).expect("rank checked");
    for (k, (a, b)) in got.coords.iter().zip(m).enumerate() {
        if a != b {
            return Err(format!("coordinate {} is {} but m has {}", roots[k].coord_name(), a.value(), b.value()));
        }
    }
    Ok(())
}

fn in_set(rec: &OrbitRecord, m: &[Fp], p: u64) -> Result<bool> {
    for q in &rec.zero_set {
        if !q.eval_mod_p(m, p)?.is_zero() {
            return Ok(false);
        }
    }
    for q in &rec.nonzero_set {
        if q.eval_mod_p(m, p)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value of `q` where variable `v` holds `vals[v] = var^g[v]`.
fn eval_poly(q: &LaurentPoly, vals: &[Fp], g: &[i32]) -> Option<Fp> {
    let p = vals[0].modulus();
    let mut acc = Fp::zero(p);
    for (e, c) in q.terms() {
        let mut t = Fp::from_rational(c, p)?;
        for (v, &x) in e.iter().enumerate() {
            if x != 0 {
                t = t * vals[v].powi((x / g[v]) as i64)?;
            }
        }
        acc = acc + t;
    }
    Some(acc)
}

fn eval_frac(f: &LaurentFraction, vals: &[Fp], g: &[i32]) -> Option<Fp> {
    let mut acc = eval_poly(f.numerator(), vals, g)?;
    for (d, &e) in f.den_factors() {
        acc = acc * eval_poly(d, vals, g)?.inv()?.pow(e as u64);
    }
    Some(acc)
}
