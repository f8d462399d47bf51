//! Alone in its binary: it sets a process-wide environment variable.

use orbit_atlas_core::catalog::{catalog_text, load_catalog, DATA_ENV};

#[test]
fn data_directory_override() {
    let dir = std::env::temp_dir().join(format!("orbit-atlas-data-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("A1.json"), catalog_text(1).unwrap()).unwrap();
    std::env::set_var(DATA_ENV, &dir);
    assert_eq!(load_catalog(1).unwrap().orbits.len(), 2);
    assert!(load_catalog(2).is_err());
    std::env::remove_var(DATA_ENV);
    std::fs::remove_dir_all(&dir).unwrap();
}
