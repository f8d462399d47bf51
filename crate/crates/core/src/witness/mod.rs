//! Certification that each catalog set is exactly one orbit.
//!
//! Two halves: [`forward_containment`] shows `B.x ⊆ S` on a generic Borel
//! element, and the witness checks show every `m ∈ S` is `b.x` for an
//! explicit `b`, either the printed one or a documented repair.

pub mod eval;
mod forward;
mod numeric;
mod printed;
mod solve;

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{parse_expr, Expr, LaurentFraction};
use crate::catalog::{Constraint, ConstraintEntry, FactorEntry, OrbitRecord, RadicalSpec, WitnessEntry};
use crate::error::Result;
use crate::lie::{adjoint, pos_roots, BorelWord, PosRoot, RootGroupFactor, TorusElement};
use eval::{Space, Value};

pub use forward::{forward_containment, generic_orbit_point, ForwardReport};
pub use numeric::{check_word_numeric, NumericOutcome};
pub use printed::{parse_printed_word, rename_word};
pub use solve::{derive_constraints, solve_witness, solve_word};

/// Primes used for numeric certification; both are `1 mod 60`.
pub const NUMERIC_PRIMES: [u64; 2] = [61, 181];
pub const NUMERIC_TRIALS: usize = 100;

/// `T(torus) U_{r1}(e1) U_{r2}(e2) ...` with entries in the coordinate letters.
#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    pub torus: Option<Vec<Expr>>,
    pub factors: Vec<(PosRoot, Expr)>,
}

impl Word {
    pub fn from_template(t: &crate::catalog::WitnessTemplate) -> Word {
        Word { torus: (!t.torus.is_empty()).then(|| t.torus.clone()), factors: t.factors.clone() }
    }

    /// Catalog form of the word with the given constraints.
    pub fn to_entry(&self, origin: &str, constraints: &[Constraint]) -> WitnessEntry {
        WitnessEntry {
            origin: origin.to_string(),
            constraints: constraints
                .iter()
                .map(|c| ConstraintEntry { poly: c.poly.to_string(), solve: c.poly.registry().name(c.solve).to_string() })
                .collect(),
            radicals: Vec::new(),
            torus: self.torus.iter().flatten().map(|e| e.to_string()).collect(),
            factors: self.factors.iter().map(|(r, e)| FactorEntry { root: r.token(), param: e.to_string() }).collect(),
        }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if let Some(t) = &self.torus {
            let v: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            parts.push(format!("T({})", v.join(", ")));
        }
        for (r, e) in &self.factors {
            parts.push(format!("U_{}({e})", r.token()));
        }
        if parts.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&parts.join(" "))
    }
}

/// Parse expression strings of a word, e.g. from the command line.
pub fn parse_word(torus: &[String], factors: &[(String, String)], n: usize) -> Result<Word> {
    let torus = if torus.is_empty() { None } else { Some(torus.iter().map(|s| parse_expr(s)).collect::<Result<_>>()?) };
    let factors =
        factors.iter().map(|(r, e)| Ok((PosRoot::parse(r, n)?, parse_expr(e)?))).collect::<Result<_>>()?;
    Ok(Word { torus, factors })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum WitnessStatus {
    VerifiedSymbolic,
    VerifiedNumeric { points: usize, fields: Vec<u64> },
    RepairedAndVerified { repair: String },
    FailedAsPrinted { discrepancy: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessVerdict {
    pub orbit_id: String,
    pub status: WitnessStatus,
    /// Nonzero coordinate differences `b.x - m`.
    pub residual: Option<Vec<String>>,
    /// Set when a numeric check had nothing to test.
    pub inconclusive: Option<String>,
}

impl WitnessVerdict {
    fn new(rec: &OrbitRecord, status: WitnessStatus) -> Self {
        WitnessVerdict { orbit_id: rec.id.clone(), status, residual: None, inconclusive: None }
    }

    fn failed(rec: &OrbitRecord, discrepancy: impl Into<String>) -> Self {
        Self::new(rec, WitnessStatus::FailedAsPrinted { discrepancy: discrepancy.into() })
    }

    pub fn verified(&self) -> bool {
        !matches!(self.status, WitnessStatus::FailedAsPrinted { .. }) && self.inconclusive.is_none()
    }

    /// Verified with the printed word exactly as typeset.
    pub fn verified_without_repair(&self) -> bool {
        self.verified() && !matches!(self.status, WitnessStatus::RepairedAndVerified { .. })
    }
}

/// Result of the exact check of one word.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolicOutcome {
    /// `(coordinate, difference)` for every coordinate where `b.x != m`.
    pub residual: Vec<(String, String)>,
    /// Denominators, radicands or torus entries that may vanish on the set.
    pub unsound: Vec<String>,
}

impl SymbolicOutcome {
    pub fn ok(&self) -> bool {
        self.residual.is_empty() && self.unsound.is_empty()
    }
}

/// Exact check that `b.x = m` for the general member `m`, with free letters
/// reparametrized as `C^big_n`.
pub fn check_word_symbolic(
    rec: &OrbitRecord,
    word: &Word,
    constraints: &[Constraint],
    radicals: &[RadicalSpec],
    big_n: i32,
) -> Result<SymbolicOutcome> {
    let sp = Space::new(rec, constraints, radicals, big_n)?;
    let mut out = SymbolicOutcome::default();
    let torus: Option<Vec<Value>> = match &word.torus {
        Some(t) => Some(t.iter().map(|e| sp.eval(e)).collect::<Result<_>>()?),
        None => None,
    };
    let params: Vec<Value> = word.factors.iter().map(|(_, e)| sp.eval(e)).collect::<Result<_>>()?;
    for (k, v) in torus.iter().flatten().enumerate() {
        for a in sp.unsound_atoms(v, true) {
            out.unsound.push(format!("torus entry {} may vanish through {a}", k + 1));
        }
    }
    for ((r, _), v) in word.factors.iter().zip(&params) {
        for a in sp.unsound_atoms(v, false) {
            out.unsound.push(format!("parameter of U_{} divides by or takes a root of {a}", r.token()));
        }
    }
    let torus_f: Option<Vec<LaurentFraction>> = match &torus {
        Some(t) => Some(t.iter().map(|v| sp.lower(v)).collect::<Result<_>>()?),
        None => None,
    };
    let params_f: Vec<LaurentFraction> = params.iter().map(|v| sp.lower(v)).collect::<Result<_>>()?;
    for (f, what) in torus_f.iter().flatten().map(|f| (f, "torus entry")).chain(params_f.iter().map(|f| (f, "parameter"))) {
        for d in f.den_factors().keys() {
            if !sp.is_protected(d) {
                out.unsound.push(format!("{what} divides by {}", sp.show_poly(d)));
            }
        }
    }
    for a in sp.slot_atoms() {
        if !sp.atom_protected(&a) {
            out.unsound.push(format!("radicand {} may vanish", sp.show_atom(&a)));
        }
    }

    let tower = Some(Arc::new(sp.tower()?));
    let attach = |f: &LaurentFraction| f.clone().with_tower(tower.clone());
    let b = BorelWord {
        n: rec.rank,
        torus: torus_f.map(|t| TorusElement { diag: t.iter().map(attach).collect() }),
        factors: word
            .factors
            .iter()
            .zip(&params_f)
            .map(|((r, _), f)| RootGroupFactor { root: *r, param: attach(f) })
            .collect(),
    };
    let x = rec.representative().map(|c| LaurentFraction::constant(&sp.ext, c.clone(), tower.clone()));
    let got = adjoint(&b, &x)?;
    let roots = pos_roots(rec.rank)?;
    for (k, (a, m)) in got.coords.iter().zip(&sp.member).enumerate() {
        let d = a.sub(&attach(m));
        if !d.is_zero() {
            out.residual.push((roots[k].coord_name(), sp.show_frac(&d)));
        }
    }
    Ok(out)
}

fn symbolic_verdict(rec: &OrbitRecord, word: &Word, repair: Option<String>, big_n: i32) -> WitnessVerdict {
    let t = &rec.witness;
    match check_word_symbolic(rec, word, &t.constraints, &t.radicals, big_n) {
        Err(e) => WitnessVerdict::failed(rec, e.to_string()),
        Ok(o) if o.ok() => match repair {
            Some(r) => WitnessVerdict::new(rec, WitnessStatus::RepairedAndVerified { repair: r }),
            None => WitnessVerdict::new(rec, WitnessStatus::VerifiedSymbolic),
        },
        Ok(o) => {
            let first = o
                .residual
                .first()
                .map(|(c, _)| format!("coordinate {c} differs"))
                .unwrap_or_else(|| o.unsound[0].clone());
            let mut v = WitnessVerdict::failed(rec, first);
            let mut lines: Vec<String> = o.residual.iter().map(|(c, d)| format!("{c}: {d}")).collect();
            lines.extend(o.unsound);
            v.residual = Some(lines);
            v
        }
    }
}

fn numeric_verdict(rec: &OrbitRecord, word: &Word, repair: Option<String>, primes: &[u64], trials: usize) -> WitnessVerdict {
    let t = &rec.witness;
    if trials == 0 {
        let mut v = WitnessVerdict::new(rec, WitnessStatus::VerifiedNumeric { points: 0, fields: primes.to_vec() });
        v.inconclusive = Some("no trials were requested".into());
        return v;
    }
    for &p in primes {
        match check_word_numeric(rec, word, &t.constraints, &t.radicals, p, trials, 0x0b17) {
            Err(e) => return WitnessVerdict::failed(rec, e.to_string()),
            Ok(o) if o.failed > 0 => {
                let mut v = WitnessVerdict::failed(rec, o.first_failure.clone().unwrap_or_default());
                v.residual = o.first_failure.map(|f| vec![f]);
                return v;
            }
            Ok(o) if o.passed < trials => {
                let mut v = WitnessVerdict::new(rec, WitnessStatus::VerifiedNumeric { points: o.passed, fields: vec![p] });
                v.inconclusive = Some(format!("only {} of {trials} samples had the required roots over F_{p}", o.passed));
                return v;
            }
            Ok(_) => {}
        }
    }
    match repair {
        Some(r) => WitnessVerdict::new(rec, WitnessStatus::RepairedAndVerified { repair: r }),
        None => WitnessVerdict::new(rec, WitnessStatus::VerifiedNumeric { points: trials, fields: primes.to_vec() }),
    }
}

/// The printed word with documented letter renamings applied.
fn printed_word(rec: &OrbitRecord) -> std::result::Result<(Word, Option<String>), String> {
    let text = rec.as_printed.witness.as_deref().ok_or("no witness is printed")?;
    let word = parse_printed_word(text, rec.rank).map_err(|e| format!("unparseable as printed: {e}"))?;
    Ok(match &rec.as_printed.letter_map {
        Some(map) if !map.is_empty() => {
            let desc: Vec<String> = map.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
            (rename_word(&word, map), Some(format!("printed letters renamed: {}", desc.join(", "))))
        }
        _ => (word, None),
    })
}

/// Exact check of the printed witness.
pub fn verify_witness_symbolic(rec: &OrbitRecord) -> WitnessVerdict {
    match printed_word(rec) {
        Ok((w, repair)) => symbolic_verdict(rec, &w, repair, 60),
        Err(e) => WitnessVerdict::failed(rec, e),
    }
}

/// Random-point check of the printed witness over `F_p`.
pub fn verify_witness_numeric(rec: &OrbitRecord, p: u64, trials: usize) -> WitnessVerdict {
    match printed_word(rec) {
        Ok((w, repair)) => numeric_verdict(rec, &w, repair, &[p], trials),
        Err(e) => WitnessVerdict::failed(rec, e),
    }
}

/// Exact check of the catalog's normalized witness with reparametrization
/// exponent `big_n`.
pub fn verify_template_symbolic(rec: &OrbitRecord, big_n: i32) -> WitnessVerdict {
    symbolic_verdict(rec, &Word::from_template(&rec.witness), None, big_n)
}

pub fn verify_template_numeric(rec: &OrbitRecord, p: u64, trials: usize) -> WitnessVerdict {
    numeric_verdict(rec, &Word::from_template(&rec.witness), None, &[p], trials)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub orbit_id: String,
    pub forward: Option<ForwardReport>,
    pub forward_error: Option<String>,
    /// Verdict on the printed word.
    pub as_printed: WitnessVerdict,
    /// Verdict that certifies the orbit: the printed word when it verifies,
    /// otherwise the catalog's repaired word.
    pub verdict: WitnessVerdict,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.forward.as_ref().is_some_and(ForwardReport::passed) && self.verdict.verified()
    }
}

fn repair_note(rec: &OrbitRecord) -> String {
    let notes: Vec<&str> = rec.notes.iter().filter_map(|n| n.strip_prefix("witness: ")).collect();
    if notes.is_empty() {
        format!("catalog word ({})", rec.witness.origin)
    } else {
        notes.join("; ")
    }
}

/// Forward containment plus the printed witness, falling back to the
/// catalog word; a repaired word must pass both the exact and the numeric
/// check.
pub fn certify(rec: &OrbitRecord) -> Certificate {
    let (forward, forward_error) = match forward_containment(rec) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut as_printed = verify_witness_symbolic(rec);
    if !as_printed.verified() {
        if let Ok((w, repair)) = printed_word(rec) {
            let numeric = numeric_verdict(rec, &w, repair, &NUMERIC_PRIMES, NUMERIC_TRIALS);
            if numeric.verified() {
                as_printed = numeric;
            }
        }
    }
    let verdict = if as_printed.verified() {
        as_printed.clone()
    } else {
        let word = Word::from_template(&rec.witness);
        let exact = symbolic_verdict(rec, &word, Some(repair_note(rec)), 60);
        if exact.verified() {
            let numeric = numeric_verdict(rec, &word, Some(repair_note(rec)), &NUMERIC_PRIMES, NUMERIC_TRIALS);
            if numeric.verified() {
                exact
            } else {
                numeric
            }
        } else {
            exact
        }
    };
    Certificate { orbit_id: rec.id.clone(), forward, forward_error, as_printed, verdict }
}

/// Domain problems of the catalog word: denominators, radicands and torus
/// entries not guaranteed nonzero on the set.
pub fn domain_soundness(rec: &OrbitRecord) -> Result<Vec<String>> {
    let t = &rec.witness;
    Ok(check_word_symbolic(rec, &Word::from_template(t), &t.constraints, &t.radicals, 60)?.unsound)
}
