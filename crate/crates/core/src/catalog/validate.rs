use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{coordinate_registry, parse_latex_set, Catalog, LatexSet, OrbitRecord};
use crate::arith::LaurentPoly;

/// Self-check of one record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordReport {
    pub id: String,
    /// The representative satisfies its own zero and nonzero conditions.
    pub membership: bool,
    pub homogeneous: bool,
    /// No coordinate is both a zero generator and a nonzero generator.
    pub sane: bool,
    /// Differences between the printed defining sets and the normalized ones.
    pub diffs: Vec<String>,
    /// Why the printed witness word cannot be read, if it cannot.
    pub witness_unparseable: Option<String>,
}

impl RecordReport {
    pub fn passed(&self) -> bool {
        self.membership && self.homogeneous && self.sane
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rank: usize,
    pub records: Vec<RecordReport>,
    /// Pairs of records with identical defining sets.
    pub duplicates: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.duplicates.is_empty() && self.records.iter().all(RecordReport::passed)
    }

    pub fn diff_count(&self) -> usize {
        self.records.iter().map(|r| r.diffs.len()).sum()
    }

    pub fn record(&self, id: &str) -> Option<&RecordReport> {
        self.records.iter().find(|r| r.id == id)
    }
}

pub fn validate_catalog(c: &Catalog) -> ValidationReport {
    let records: Vec<RecordReport> = c.orbits.iter().map(validate_record).collect();
    let mut duplicates = Vec::new();
    let keys: Vec<_> = c.orbits.iter().map(|o| (key_set(&o.zero_set), key_set(&o.nonzero_set))).collect();
    for a in 0..keys.len() {
        for b in a + 1..keys.len() {
            if keys[a] == keys[b] {
                duplicates.push((c.orbits[a].id.clone(), c.orbits[b].id.clone()));
            }
        }
    }
    ValidationReport { rank: c.rank, records, duplicates }
}

fn validate_record(o: &OrbitRecord) -> RecordReport {
    let rep: Vec<BigRational> = o.representative().coords;
    let vanishes = |p: &LaurentPoly| p.eval_rational(&rep).map(|v| v.is_zero()).unwrap_or(false);
    let membership =
        o.zero_set.iter().all(vanishes) && o.nonzero_set.iter().all(|p| !vanishes(p));
    let homogeneous = o.zero_set.iter().chain(&o.nonzero_set).all(LaurentPoly::is_homogeneous);
    let zc: BTreeSet<usize> = o.zero_coordinates().into_iter().collect();
    let sane = o.nonzero_coordinates().iter().all(|k| !zc.contains(k));

    let reg = coordinate_registry(o.rank).expect("rank checked on load");
    let mut diffs = Vec::new();
    let mut printed = vec![("dimension table", o.as_printed.equations.as_str())];
    if let Some(w) = &o.as_printed.witness_equations {
        printed.push(("witness table", w.as_str()));
    }
    for (label, text) in printed {
        match parse_latex_set(text, o.rank, &reg) {
            Ok(set) => diffs.extend(set_diffs(label, &set, o)),
            Err(e) => diffs.push(format!("{label}: printed set is unreadable ({e})")),
        }
    }
    let witness_unparseable = match &o.as_printed.witness {
        Some(w) => crate::witness::parse_printed_word(w, o.rank).err().map(|e| e.to_string()),
        None => Some("no witness is printed".into()),
    };
    RecordReport { id: o.id.clone(), membership, homogeneous, sane, diffs, witness_unparseable }
}

fn set_diffs(label: &str, set: &LatexSet, o: &OrbitRecord) -> Vec<String> {
    let mut out = Vec::new();
    for (what, printed, normal) in [("zero", &set.zero, &o.zero_set), ("nonzero", &set.nonzero, &o.nonzero_set)] {
        let p = key_set(printed);
        let q = key_set(normal);
        for extra in p.difference(&q) {
            out.push(format!("{label}: printed {what} generator {extra} is not in the normalized set"));
        }
        for missing in q.difference(&p) {
            out.push(format!("{label}: normalized {what} generator {missing} is not printed"));
        }
    }
    let zero_vars: BTreeSet<String> = set.zero.iter().filter(|p| p.num_terms() == 1).map(|p| key(p).to_string()).collect();
    for p in &set.nonzero {
        if p.num_terms() == 1 && zero_vars.contains(&key(p).to_string()) {
            out.push(format!("{label}: {} is printed as both zero and nonzero", key(p)));
        }
    }
    out
}

/// Generator scaled to leading coefficient one.
fn key(p: &LaurentPoly) -> LaurentPoly {
    match p.leading_term() {
        Some((_, c)) if !c.is_one() => p.scale(&(BigRational::one() / c)),
        _ => p.clone(),
    }
}

fn key_set(ps: &[LaurentPoly]) -> BTreeSet<String> {
    ps.iter().map(|p| key(p).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn rank_two_is_clean() {
        let r = validate_catalog(&load_catalog(2).unwrap());
        assert!(r.passed());
        assert_eq!(r.diff_count(), 0);
        assert!(r.records.iter().all(|x| x.witness_unparseable.is_none()));
    }

    #[test]
    fn a4_conflicts_are_flagged() {
        let r = validate_catalog(&load_catalog(4).unwrap());
        assert!(r.passed(), "{r:?}");
        let x = r.record("x44+x12+x13").unwrap();
        assert!(x.diffs.iter().any(|d| d.starts_with("dimension table")), "{x:?}");
        assert!(x.diffs.iter().any(|d| d.contains("both zero and nonzero")));
        assert!(r.record("x22+x44").unwrap().witness_unparseable.is_some());
        assert!(r.record("x14").unwrap().diffs.is_empty());
    }
}
