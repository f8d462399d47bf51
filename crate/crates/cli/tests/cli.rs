use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbit-atlas")).args(args).env_remove("ORBIT_ATLAS_DATA").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_examples() {
    let o = run(&["classify", "--type", "A2", "--point", "0,0,5", "--mod", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x12\n");
    let o = run(&["classify", "--type", "A1", "--point", "0"]);
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["classify", "--type", "A3", "--point", "0,-2,0,1/2,1,-1/4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x22\n");
}

#[test]
fn census_rows_sum_to_the_field_size() {
    let o = run(&["census", "--type", "A2", "--q", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    let total: u64 = rows.iter().map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 27);
}

#[test]
fn flag_errors_exit_with_two() {
    assert_eq!(run(&["classify", "--type", "A5", "--point", "0"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--point", "0"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--type", "A2", "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--type", "A2", "--point", "1,2,3", "--mod", "8"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--type", "A4", "--q", "5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn corrupted_catalog_fails_with_the_point() {
    let dir = std::env::temp_dir().join(format!("orbit-atlas-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = run(&["orbits", "--type", "A2", "--format", "json"]).stdout;
    let mut file: serde_json::Value = serde_json::from_slice(&text).unwrap();
    let orbits = file["orbits"].as_array_mut().unwrap();
    // x^3 - x vanishes on F_3, so x12 loses its points there.
    let x12 = orbits.iter_mut().find(|o| o["id"] == "x12").unwrap();
    x12["nonzero_set"] = serde_json::json!(["X12^3 - X12"]);
    std::fs::write(dir.join("A2.json"), serde_json::to_string(&file).unwrap()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_orbit-atlas"))
        .args(["census", "--type", "A2", "--q", "3"])
        .env("ORBIT_ATLAS_DATA", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("lies in no stratum"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn orbits_json_is_the_catalog_file() {
    let o = run(&["orbits", "--type", "A3", "--format", "json"]);
    assert_eq!(stdout(&o), orbit_atlas_core::catalog::load_catalog(3).unwrap().to_json());
}

#[test]
fn hasse_output_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("orbit-atlas-dot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.dot"), dir.join("b.dot"));
    let o1 = run(&["hasse", "--type", "A2", "--dot", a.to_str().unwrap(), "--format", "json"]);
    let o2 = run(&["hasse", "--type", "A2", "--dot", b.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o1.stdout, o2.stdout);
    let dot = std::fs::read_to_string(&a).unwrap();
    assert_eq!(dot, std::fs::read_to_string(&b).unwrap());
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(
        edges,
        [
            "  \"0\" -> \"x12\";",
            "  \"x11\" -> \"x11+x22\";",
            "  \"x12\" -> \"x11\";",
            "  \"x12\" -> \"x22\";",
            "  \"x22\" -> \"x11+x22\";"
        ]
    );
    let json: serde_json::Value = serde_json::from_slice(&o1.stdout).unwrap();
    assert_eq!(json["nodes"].as_array().unwrap().len(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_lists_every_record() {
    let o = run(&["verify", "--type", "A3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 16);
    let table = stdout(&run(&["verify", "--type", "A3"]));
    assert!(table.ends_with("16/16 certified, 13 verified as printed\n"), "{table}");
}

#[test]
fn check_all_passes_for_small_ranks() {
    for t in ["A1", "A2", "A3"] {
        let o = run(&["check-all", "--type", t, "--threads", "1"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert_eq!(stdout(&o).lines().count(), 9);
        assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    }
}

#[test]
fn oracle_and_dims_report() {
    let o = run(&["oracle", "--type", "A2", "--q", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["refine"]["strata_met"], 5);
    let o = run(&["dims", "--type", "A4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("x22 ") && l.contains(" 4 ")));
}
