//! Every check for one rank, reported one line each.

use std::time::Instant;

use orbit_atlas_core::catalog::{validate_catalog, Catalog};
use orbit_atlas_core::classify::{classify, partition_census};
use orbit_atlas_core::lie::laws::action_law_failure;
use orbit_atlas_core::oracle::{dependency_identity_residual, enumerate_borel_orbits, jacobian_rank_dim, refine_check, DEFAULT_ORACLE_BUDGET};
use orbit_atlas_core::order::hasse;
use orbit_atlas_core::witness::{certify, forward_containment};

pub struct CheckResult {
    pub name: String,
    pub detail: String,
    pub failure: Option<String>,
}

const EXPECTED: [usize; 4] = [2, 5, 16, 61];

fn census_fields(n: usize) -> &'static [u64] {
    if n == 4 {
        &[2, 3, 5]
    } else {
        &[3, 5, 7, 11]
    }
}

fn oracle_fields(n: usize) -> &'static [u64] {
    if n == 4 {
        &[2, 3]
    } else {
        &[2, 3, 5, 7]
    }
}

type Check = anyhow::Result<(String, Option<String>)>;

fn timed(name: &str, f: impl FnOnce() -> Check) -> anyhow::Result<CheckResult> {
    let t = Instant::now();
    let (detail, failure) = f()?;
    eprintln!("{name}: {:.2} s", t.elapsed().as_secs_f64());
    Ok(CheckResult { name: name.into(), detail, failure })
}

pub fn run_all(cat: &Catalog, budget: u128) -> anyhow::Result<Vec<CheckResult>> {
    let n = cat.rank;
    let expected = EXPECTED[n - 1];
    let mut out = Vec::new();

    out.push(timed("catalog", || {
        let v = validate_catalog(cat);
        let bad = v.records.iter().find(|r| !r.passed()).map(|r| format!("record {} fails its self-check", r.id));
        let dup = v.duplicates.first().map(|(a, b)| format!("{a} and {b} have the same defining sets"));
        let count = (cat.orbits.len() != expected).then(|| format!("{} records, expected {expected}", cat.orbits.len()));
        Ok((format!("{} records, {} printed/normalized differences", cat.orbits.len(), v.diff_count()), count.or(bad).or(dup)))
    })?);

    out.push(timed("census", || {
        let mut detail = Vec::new();
        for &q in census_fields(n) {
            let c = partition_census(cat, q, budget)?;
            detail.push(format!("q={q}: {}", c.nonempty()));
            if q > 2 && c.nonempty() != expected {
                return Ok((detail.join(", "), Some(format!("{} nonempty strata over F_{q}, expected {expected}", c.nonempty()))));
            }
        }
        Ok((format!("nonempty strata {}; every point in exactly one stratum", detail.join(", ")), None))
    })?);

    out.push(timed("oracle", || {
        let mut detail = Vec::new();
        for &q in oracle_fields(n) {
            let part = enumerate_borel_orbits(n, q, DEFAULT_ORACLE_BUDGET)?;
            let r = refine_check(cat, &part)?;
            detail.push(format!("q={q}: {} orbits", r.classes));
            if let Some(v) = r.violations.first() {
                return Ok((detail.join(", "), Some(format!("F_{q}: {v}"))));
            }
            if !part.sizes_divide_group_order() {
                return Ok((detail.join(", "), Some(format!("F_{q}: an orbit size does not divide |B|"))));
            }
        }
        Ok((format!("catalog refines brute-force orbits, {}", detail.join(", ")), None))
    })?);

    out.push(timed("dimensions", || {
        for r in &cat.orbits {
            let d = jacobian_rank_dim(r, 20)?;
            if !d.matches() {
                return Ok((String::new(), Some(format!("{}: Jacobian dimension {}, catalog {}", r.id, d.dim, d.catalog_dim))));
            }
        }
        Ok((format!("{} Jacobian dimensions match", cat.orbits.len()), None))
    })?);

    out.push(timed("representatives", || {
        for r in &cat.orbits {
            let got = classify(cat, &r.representative())?.orbit_id;
            if got != r.id {
                return Ok((String::new(), Some(format!("representative of {} classifies as {got}", r.id))));
            }
        }
        Ok((format!("{} representatives classify to their own stratum", cat.orbits.len()), None))
    })?);

    out.push(timed("closure order", || {
        let p = hasse(cat)?;
        let mut failure = p.invariant_violations().into_iter().next();
        if n >= 3 && !p.le("x12+x23", "x11+x33") {
            failure = failure.or(Some("x12+x23 is not below x11+x33".into()));
        }
        let detail = format!(
            "{} covers, {} non-relations with counterexamples, {} flagged",
            p.covers.len(),
            p.non_relations.len(),
            p.flagged.len()
        );
        Ok((detail, failure))
    })?);

    out.push(timed("forward containment", || {
        for r in &cat.orbits {
            let f = forward_containment(r)?;
            if !f.passed() {
                return Ok((String::new(), Some(format!("{}: {:?}", r.id, f))));
            }
        }
        Ok((format!("{} orbits lie in their sets", cat.orbits.len()), None))
    })?);

    out.push(timed("witnesses", || {
        let certs: Vec<_> = cat.orbits.iter().map(certify).collect();
        let plain = certs.iter().filter(|c| c.as_printed.verified_without_repair()).count();
        let done = certs.iter().filter(|c| c.certified()).count();
        let failure = certs.iter().find(|c| !c.certified()).map(|c| format!("{} not certified: {:?}", c.orbit_id, c.verdict.status));
        Ok((format!("{done}/{} certified, {plain} as printed", certs.len()), failure))
    })?);

    out.push(timed("identities", || {
        if let Some(f) = action_law_failure(n, 101, 1000, 0xb0)? {
            return Ok((String::new(), Some(f)));
        }
        if let Some(f) = orbit_atlas_core::classify::scaling_failure(cat, 101, 1000, 0x5c)? {
            return Ok((String::new(), Some(f)));
        }
        let residual = dependency_identity_residual()?;
        if !residual.is_zero() {
            return Ok((String::new(), Some(format!("dependency identity leaves {residual}"))));
        }
        Ok(("action laws and scaling on 1000 pairs each; dependency identity is 0".into(), None))
    })?);

    Ok(out)
}

pub fn render(results: &[CheckResult]) -> String {
    let mut s = String::new();
    for r in results {
        let mark = if r.failure.is_none() { "PASS" } else { "FAIL" };
        let detail = r.failure.as_deref().unwrap_or(&r.detail);
        s.push_str(&format!("{mark} {:<20} {detail}\n", r.name));
    }
    s
}
