use orbit_atlas_core::catalog::{catalog_text, load_catalog, parse_catalog};
use orbit_atlas_core::classify::partition_census;
use orbit_atlas_core::oracle::{enumerate_borel_orbits, refine_check};
use orbit_atlas_core::order::hasse;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cat = load_catalog(3).unwrap();
    let one = in_pool(1, || (partition_census(&cat, 5, 1 << 20).unwrap(), hasse(&cat).unwrap().emit_dot()));
    let three = in_pool(3, || (partition_census(&cat, 5, 1 << 20).unwrap(), hasse(&cat).unwrap().emit_dot()));
    assert_eq!(one, three);
}

#[test]
fn catalog_files_round_trip() {
    for n in 1..=4 {
        let text = catalog_text(n).unwrap();
        assert_eq!(parse_catalog(n, &text).unwrap().to_json(), text);
    }
}

#[test]
fn census_counts_are_unions_of_rational_orbits() {
    let cat = load_catalog(3).unwrap();
    let part = enumerate_borel_orbits(3, 3, 1 << 20).unwrap();
    let report = refine_check(&cat, &part).unwrap();
    let census = partition_census(&cat, 3, 1 << 20).unwrap();
    let mut sizes = vec![0u64; cat.orbits.len()];
    for (label, size) in part.classes() {
        let pt = part.point(label);
        let m = orbit_atlas_core::lie::NilElement::new(
            3,
            pt.iter().map(|&v| orbit_atlas_core::arith::Fp::from_u64(v, 3)).collect(),
        )
        .unwrap();
        let id = orbit_atlas_core::classify::classify(&cat, &m).unwrap().orbit_id;
        sizes[cat.index_of(&id).unwrap()] += size;
    }
    let counts: Vec<u64> = census.counts.iter().map(|(_, c)| *c).collect();
    assert_eq!(sizes, counts);
    assert!(report.passed());
}
