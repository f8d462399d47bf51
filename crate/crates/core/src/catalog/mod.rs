//! Orbit catalogs for `A1`..`A4`.
//!
//! Each rank has one JSON file with two layers per orbit: the normalized
//! data every other module consumes, and the `as_printed` text it was
//! transcribed from. Every difference between the two is explained in the
//! record's `notes`.

mod latex;
mod validate;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{parse_expr, parse_poly, Expr, LaurentPoly, Registry};
use crate::error::{Error, Result};
use crate::lie::{check_rank, pos_roots, root_index, NilElement, PosRoot};

pub use latex::{parse_latex_set, LatexSet};
pub use validate::{validate_catalog, RecordReport, ValidationReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Orbit counts for ranks 1..=4.
pub const ORBIT_COUNTS: [usize; 4] = [2, 5, 16, 61];

const BUNDLED: [&str; 4] = [
    include_str!("../../data/A1.json"),
    include_str!("../../data/A2.json"),
    include_str!("../../data/A3.json"),
    include_str!("../../data/A4.json"),
];

/// Environment variable naming a directory with `A1.json`..`A4.json`.
pub const DATA_ENV: &str = "ORBIT_ATLAS_DATA";

/// Coordinate letters of a general element, in canonical root order.
pub fn coordinate_letters(n: usize) -> Result<&'static [&'static str]> {
    const L1: [&str; 1] = ["z"];
    const L2: [&str; 3] = ["x", "y", "z"];
    const L3: [&str; 6] = ["u", "v", "w", "x", "y", "z"];
    const L4: [&str; 10] = ["q", "r", "s", "t", "u", "v", "w", "x", "y", "z"];
    Ok(match n {
        1 => &L1,
        2 => &L2,
        3 => &L3,
        4 => &L4,
        _ => return Err(Error::Rank(n)),
    })
}

/// Registry of the coordinate functions `X11, X22, ...` in root order.
pub fn coordinate_registry(n: usize) -> Result<Arc<Registry>> {
    Registry::new(pos_roots(n)?.into_iter().map(|r| r.coord_name()))
}

pub fn letter_registry(n: usize) -> Result<Arc<Registry>> {
    Registry::new(coordinate_letters(n)?.iter().copied())
}

// ---------------------------------------------------------------- file model

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    #[serde(rename = "type")]
    pub type_name: String,
    pub schema_version: u32,
    pub orbits: Vec<OrbitEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitEntry {
    pub id: String,
    pub rep: Vec<String>,
    pub zero_set: Vec<String>,
    pub nonzero_set: Vec<String>,
    pub dim: usize,
    pub witness: WitnessEntry,
    pub as_printed: AsPrinted,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    /// `as_printed`, `normalized` (letters renamed) or `solved`.
    pub origin: String,
    pub constraints: Vec<ConstraintEntry>,
    pub radicals: Vec<RadicalEntry>,
    pub torus: Vec<String>,
    pub factors: Vec<FactorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub poly: String,
    pub solve: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadicalEntry {
    pub name: String,
    pub order: u32,
    pub radicand: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    pub root: String,
    pub param: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsPrinted {
    /// Defining set from the dimension table.
    pub equations: String,
    /// Defining set repeated in the witness table, where there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_equations: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Letters the printed word uses for other coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter_map: Option<BTreeMap<String, String>>,
}

// ------------------------------------------------------------- parsed model

/// Equality constraint `poly = 0` on a general member, solved for `solve`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub poly: LaurentPoly,
    pub solve: usize,
}

#[derive(Clone, Debug)]
pub struct RadicalSpec {
    pub name: String,
    pub order: u32,
    pub radicand: Expr,
}

/// A conjugating word whose entries are expressions in the coordinate letters.
#[derive(Clone, Debug)]
pub struct WitnessTemplate {
    pub origin: String,
    pub constraints: Vec<Constraint>,
    pub radicals: Vec<RadicalSpec>,
    pub torus: Vec<Expr>,
    pub factors: Vec<(PosRoot, Expr)>,
}

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub id: String,
    pub rank: usize,
    pub rep: Vec<PosRoot>,
    pub zero_set: Vec<LaurentPoly>,
    pub nonzero_set: Vec<LaurentPoly>,
    pub dim: usize,
    pub witness: WitnessTemplate,
    pub as_printed: AsPrinted,
    pub notes: Vec<String>,
}

impl OrbitRecord {
    pub fn representative(&self) -> NilElement<BigRational> {
        let n = self.rank;
        let mut coords = vec![BigRational::from_integer(0.into()); n * (n + 1) / 2];
        for r in &self.rep {
            coords[root_index(n, *r)] = BigRational::from_integer(1.into());
        }
        NilElement { n, coords }
    }

    /// Coordinates forced to vanish by a single-variable zero generator.
    pub fn zero_coordinates(&self) -> Vec<usize> {
        single_vars(&self.zero_set)
    }

    /// Coordinates required nonzero by a single-variable generator.
    pub fn nonzero_coordinates(&self) -> Vec<usize> {
        single_vars(&self.nonzero_set)
    }

    /// Zero generators that are not coordinate functions.
    pub fn nonlinear_zero_set(&self) -> Vec<&LaurentPoly> {
        self.zero_set.iter().filter(|p| single_var(p).is_none()).collect()
    }
}

fn single_var(p: &LaurentPoly) -> Option<usize> {
    let (e, _) = p.as_monomial()?;
    let mut it = e.iter().enumerate().filter(|(_, &x)| x != 0);
    match (it.next(), it.next()) {
        (Some((k, 1)), None) => Some(k),
        _ => None,
    }
}

fn single_vars(ps: &[LaurentPoly]) -> Vec<usize> {
    let mut v: Vec<usize> = ps.iter().filter_map(single_var).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub rank: usize,
    pub schema_version: u32,
    pub orbits: Vec<OrbitRecord>,
    source: CatalogFile,
}

impl Catalog {
    pub fn get(&self, id: &str) -> Option<&OrbitRecord> {
        self.orbits.iter().find(|o| o.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.id == id)
    }

    pub fn file(&self) -> &CatalogFile {
        &self.source
    }

    /// Canonical JSON text; loading and re-serializing a stored file
    /// reproduces it byte for byte.
    pub fn to_json(&self) -> String {
        serialize_catalog(&self.source)
    }
}

pub fn serialize_catalog(file: &CatalogFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("catalog serializes");
    s.push('\n');
    s
}

/// Text of the catalog file for rank `n`, honoring [`DATA_ENV`].
pub fn catalog_text(n: usize) -> Result<String> {
    check_rank(n)?;
    if let Ok(dir) = std::env::var(DATA_ENV) {
        let path = PathBuf::from(dir).join(format!("A{n}.json"));
        return std::fs::read_to_string(&path)
            .map_err(|e| Error::Catalog(format!("cannot read {}: {e}", path.display())));
    }
    Ok(BUNDLED[n - 1].to_string())
}

pub fn load_catalog(n: usize) -> Result<Catalog> {
    parse_catalog(n, &catalog_text(n)?)
}

pub fn parse_catalog(n: usize, text: &str) -> Result<Catalog> {
    check_rank(n)?;
    let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::Catalog(format!("A{n}: {e}")))?;
    catalog_from_file(n, file)
}

pub fn catalog_from_file(n: usize, file: CatalogFile) -> Result<Catalog> {
    if file.type_name != format!("A{n}") {
        return Err(Error::Catalog(format!("file declares type {} but A{n} was requested", file.type_name)));
    }
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Catalog(format!("unsupported schema version {}", file.schema_version)));
    }
    let xreg = coordinate_registry(n)?;
    let lreg = letter_registry(n)?;
    let mut orbits = Vec::with_capacity(file.orbits.len());
    for (row, e) in file.orbits.iter().enumerate() {
        let rec = parse_record(n, e, &xreg, &lreg)
            .map_err(|err| Error::Catalog(format!("A{n} row {row} ({}): {err}", e.id)))?;
        orbits.push(rec);
    }
    check_integrity(n, &orbits)?;
    Ok(Catalog { rank: n, schema_version: file.schema_version, orbits, source: file })
}

fn parse_record(n: usize, e: &OrbitEntry, xreg: &Arc<Registry>, lreg: &Arc<Registry>) -> Result<OrbitRecord> {
    let rep: Vec<PosRoot> = e.rep.iter().map(|t| PosRoot::parse(t, n)).collect::<Result<_>>()?;
    let expected_id = if rep.is_empty() { "0".to_string() } else { e.rep.join("+") };
    if expected_id != e.id {
        return Err(Error::Catalog(format!("id does not match representative {expected_id}")));
    }
    let polys = |v: &[String]| -> Result<Vec<LaurentPoly>> { v.iter().map(|s| parse_poly(s, xreg)).collect() };
    let zero_set = polys(&e.zero_set)?;
    let nonzero_set = polys(&e.nonzero_set)?;
    for p in zero_set.iter().chain(&nonzero_set) {
        if p.is_zero() || !p.is_polynomial() {
            return Err(Error::Catalog(format!("`{p}` is not a nonzero polynomial")));
        }
    }
    Ok(OrbitRecord {
        id: e.id.clone(),
        rank: n,
        rep,
        zero_set,
        nonzero_set,
        dim: e.dim,
        witness: parse_witness(n, &e.witness, lreg)?,
        as_printed: e.as_printed.clone(),
        notes: e.notes.clone(),
    })
}

pub fn parse_witness(n: usize, w: &WitnessEntry, lreg: &Arc<Registry>) -> Result<WitnessTemplate> {
    let mut constraints = Vec::new();
    for c in &w.constraints {
        let poly = parse_poly(&c.poly, lreg)?;
        let solve = lreg.index_of(&c.solve).ok_or_else(|| Error::UnknownVariable(c.solve.clone()))?;
        if poly.max_degree_in(solve) != 1 || poly.min_degree_in(solve) != 0 {
            return Err(Error::Catalog(format!("constraint `{}` is not linear in {}", c.poly, c.solve)));
        }
        constraints.push(Constraint { poly, solve });
    }
    let radicals = w
        .radicals
        .iter()
        .map(|r| {
            if !(2..=5).contains(&r.order) {
                return Err(Error::Catalog(format!("radical order {} outside 2..=5", r.order)));
            }
            Ok(RadicalSpec { name: r.name.clone(), order: r.order, radicand: parse_expr(&r.radicand)? })
        })
        .collect::<Result<_>>()?;
    if !w.torus.is_empty() && w.torus.len() != n {
        return Err(Error::Catalog(format!("torus has {} entries, expected {n}", w.torus.len())));
    }
    let torus = w.torus.iter().map(|s| parse_expr(s)).collect::<Result<_>>()?;
    let factors = w
        .factors
        .iter()
        .map(|f| Ok((PosRoot::parse(&f.root, n)?, parse_expr(&f.param)?)))
        .collect::<Result<_>>()?;
    Ok(WitnessTemplate { origin: w.origin.clone(), constraints, radicals, torus, factors })
}

fn check_integrity(n: usize, orbits: &[OrbitRecord]) -> Result<()> {
    let want = ORBIT_COUNTS[n - 1];
    if orbits.len() != want {
        return Err(Error::Catalog(format!("A{n} must have {want} orbits, found {}", orbits.len())));
    }
    let mut seen = std::collections::BTreeSet::new();
    for o in orbits {
        if !seen.insert(o.id.as_str()) {
            return Err(Error::Catalog(format!("duplicate id {}", o.id)));
        }
    }
    let regular = orbits.iter().filter(|o| o.zero_set.is_empty()).count();
    let zero = orbits.iter().filter(|o| o.nonzero_set.is_empty()).count();
    if regular != 1 || zero != 1 {
        return Err(Error::Catalog(format!(
            "expected one orbit without zero conditions and one without nonzero conditions, found {regular} and {zero}"
        )));
    }
    let full = n * (n + 1) / 2;
    for o in orbits {
        if o.dim > full {
            return Err(Error::Catalog(format!("{}: dimension {} exceeds {full}", o.id, o.dim)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalogs_load_and_round_trip() {
        for n in 1..=4 {
            let c = load_catalog(n).unwrap();
            assert_eq!(c.orbits.len(), ORBIT_COUNTS[n - 1]);
            assert_eq!(c.to_json(), BUNDLED[n - 1]);
        }
    }

    #[test]
    fn rank_one_dimensions() {
        let c = load_catalog(1).unwrap();
        let dims: Vec<usize> = c.orbits.iter().map(|o| o.dim).collect();
        assert_eq!(dims, [0, 1]);
    }

    #[test]
    fn a4_dimension_histogram() {
        let c = load_catalog(4).unwrap();
        let mut h = [0usize; 11];
        for o in &c.orbits {
            h[o.dim] += 1;
        }
        assert_eq!(h, [1, 1, 2, 4, 7, 9, 12, 12, 8, 4, 1]);
    }

    #[test]
    fn a3_x22_record() {
        let c = load_catalog(3).unwrap();
        let r = c.get("x22").unwrap();
        let z: Vec<String> = r.zero_set.iter().map(|p| p.to_string()).collect();
        let reg = coordinate_registry(3).unwrap();
        let expect: Vec<String> = ["X11", "X33", "X22*X13 - X12*X23"]
            .iter()
            .map(|s| parse_poly(s, &reg).unwrap().to_string())
            .collect();
        assert_eq!(z, expect);
        assert_eq!(r.nonzero_set.len(), 1);
        assert_eq!(r.dim, 3);
    }

    #[test]
    fn integrity_errors_name_the_problem() {
        let mut f: CatalogFile = serde_json::from_str(BUNDLED[1]).unwrap();
        f.orbits.pop();
        assert!(matches!(catalog_from_file(2, f.clone()), Err(Error::Catalog(m)) if m.contains("5 orbits")));
        let mut g: CatalogFile = serde_json::from_str(BUNDLED[1]).unwrap();
        g.orbits[1] = g.orbits[2].clone();
        assert!(matches!(catalog_from_file(2, g), Err(Error::Catalog(m)) if m.contains("duplicate")));
        let mut h: CatalogFile = serde_json::from_str(BUNDLED[1]).unwrap();
        h.orbits[2].zero_set[0] = "X22 +* X11".into();
        assert!(matches!(catalog_from_file(2, h), Err(Error::Catalog(m)) if m.contains("row 2")));
    }
}
