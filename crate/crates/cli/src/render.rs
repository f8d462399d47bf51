//! Plain-text tables; each is a rendering of the matching JSON output.

use std::fmt::Write;

use orbit_atlas_core::catalog::Catalog;
use orbit_atlas_core::classify::Census;
use orbit_atlas_core::oracle::{DimensionReport, OrbitPartition, RefineReport};
use orbit_atlas_core::order::HassePoset;
use orbit_atlas_core::witness::{Certificate, WitnessStatus, WitnessVerdict};

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (k, c) in r.iter().enumerate() {
            w[k] = w[k].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, c) in cells.iter().enumerate() {
            if k + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<width$}  ", width = w[k]);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

fn join<T: ToString>(v: &[T]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
    }
}

pub fn orbits_table(cat: &Catalog) -> String {
    let rows: Vec<Vec<String>> = cat
        .orbits
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.dim.to_string(),
                r.witness.origin.clone(),
                join(&r.zero_set),
                join(&r.nonzero_set),
            ]
        })
        .collect();
    table(&["id", "dim", "witness", "zero set", "nonzero set"], &rows)
}

pub fn census_table(c: &Census) -> String {
    let mut rows: Vec<Vec<String>> = c.counts.iter().map(|(id, n)| vec![id.clone(), n.to_string()]).collect();
    rows.push(vec!["total".into(), c.total.to_string()]);
    let mut s = table(&["orbit", "points"], &rows);
    let _ = writeln!(s, "A{} over F_{}: {} nonempty strata", c.rank, c.q, c.nonempty());
    s
}

pub fn oracle_table(r: &RefineReport, part: &OrbitPartition) -> String {
    let rows: Vec<Vec<String>> = r.classes_per_stratum.iter().map(|(id, k)| vec![id.clone(), k.to_string()]).collect();
    let mut s = table(&["orbit", "rational orbits"], &rows);
    let _ = writeln!(s, "A{} over F_{}: {} rational orbits in {} strata", r.rank, r.q, r.classes, r.strata_met);
    let _ = writeln!(
        s,
        "stability: {} root group elements, {} torus elements{}",
        part.stability.root_elements,
        part.stability.torus_elements,
        if part.stability.full_torus { " (whole torus)" } else { " (generators)" }
    );
    if !r.empty_strata.is_empty() {
        let _ = writeln!(s, "strata without points: {}", join(&r.empty_strata));
    }
    let _ = writeln!(s, "refinement: {}", if r.passed() { "ok" } else { "FAILED" });
    s
}

pub fn dims_table(reports: &[DimensionReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.catalog_dim.to_string(),
                r.dim.to_string(),
                r.rank_at_representative.to_string(),
                r.max_rank.to_string(),
                if r.matches() { "ok" } else { "MISMATCH" }.into(),
            ]
        })
        .collect();
    table(&["orbit", "catalog dim", "jacobian dim", "rank at rep", "max rank", "status"], &rows)
}

pub fn hasse_table(p: &HassePoset) -> String {
    let rows: Vec<Vec<String>> = p.cover_ids().into_iter().map(|(a, b)| vec![a.to_string(), b.to_string()]).collect();
    let mut s = table(&["lower", "upper"], &rows);
    let _ = writeln!(
        s,
        "A{}: {} strata, {} covers, {} non-relations with counterexamples, {} pairs decided by points alone",
        p.rank,
        p.nodes.len(),
        p.covers.len(),
        p.non_relations.len(),
        p.flagged.len()
    );
    for v in p.invariant_violations() {
        let _ = writeln!(s, "violation: {v}");
    }
    s
}

pub fn status_name(v: &WitnessVerdict) -> String {
    let base = match &v.status {
        WitnessStatus::VerifiedSymbolic => "VerifiedSymbolic".to_string(),
        WitnessStatus::VerifiedNumeric { .. } => "VerifiedNumeric".to_string(),
        WitnessStatus::RepairedAndVerified { .. } => "RepairedAndVerified".to_string(),
        WitnessStatus::FailedAsPrinted { .. } => "FailedAsPrinted".to_string(),
    };
    match &v.inconclusive {
        Some(_) => format!("{base} (inconclusive)"),
        None => base,
    }
}

pub fn verify_table(certs: &[Certificate]) -> String {
    let rows: Vec<Vec<String>> = certs
        .iter()
        .map(|c| {
            vec![
                c.orbit_id.clone(),
                match (&c.forward, &c.forward_error) {
                    (Some(f), _) if f.passed() => "ok".into(),
                    (Some(_), _) => "FAILED".into(),
                    (None, _) => "error".into(),
                },
                status_name(&c.as_printed),
                status_name(&c.verdict),
                if c.certified() { "yes" } else { "NO" }.into(),
            ]
        })
        .collect();
    let mut s = table(&["orbit", "forward", "as printed", "final", "certified"], &rows);
    let done = certs.iter().filter(|c| c.certified()).count();
    let plain = certs.iter().filter(|c| c.as_printed.verified_without_repair()).count();
    let _ = writeln!(s, "{done}/{} certified, {plain} verified as printed", certs.len());
    s
}
