//! End-to-end checks of the binary: exit codes, report stability, catalog
//! round-trips, and the fixture workflow.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hamcheck"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_family_exits_zero() {
    let out = run(&["verify", fixture("p1_family.hop").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("HAMILTONIAN"));
}

#[test]
fn verify_bad_omega_exits_one_and_names_the_condition() {
    let out = run(&["verify", "--json", fixture("p1_bad.hop").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["hamiltonian"], false);
    let failures = json["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures[0]["condition"]
        .as_str()
        .unwrap()
        .starts_with("C1["));
}

#[test]
fn verify_malformed_exits_two_with_position() {
    let out = run(&["verify", fixture("malformed.hop").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("3:11"), "{err}");
}

#[test]
fn verify_family_restriction() {
    // M-only check of the bad omega passes (the defect is in C)
    let out = run(&[
        "verify",
        "--family",
        "M",
        fixture("p1_bad.hop").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "verify",
        "--family",
        "C",
        fixture("p1_bad.hop").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn full_range_expands_tuple_counts() {
    let path = fixture("p1_family.hop");
    let narrow = run(&["verify", "--json", path.to_str().unwrap()]);
    let wide = run(&["verify", "--json", "--full-range", path.to_str().unwrap()]);
    let get = |o: &Output, fam: &str| -> u64 {
        let json: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        json["families"]
            .as_array()
            .unwrap()
            .iter()
            .find(|f| f["family"] == fam)
            .map(|f| f["checked"].as_u64().unwrap())
            .unwrap_or(0)
    };
    assert!(get(&wide, "W1") > get(&narrow, "W1"));
    assert!(get(&wide, "M1") > get(&narrow, "M1"));
    assert_eq!(
        run(&["verify", "--full-range", path.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn catalog_list_has_26_stable_rows() {
    let out = run(&["catalog", "list", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 26);
    assert_eq!(rows[0]["name"], "P1");
    assert_eq!(rows[24]["name"], "ThreeWave1D");
    // a second run yields byte-identical output (determinism)
    let again = run(&["catalog", "list", "--json"]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn catalog_verify_unknown_name_exits_two() {
    let out = run(&["catalog", "verify", "P99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn catalog_verify_p7_all_cases() {
    let out = run(&["catalog", "verify", "P7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
}

#[test]
fn catalog_export_then_verify_round_trips() {
    let dir = std::env::temp_dir().join("hamcheck_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("P14.hop");
    let out = run(&["catalog", "export", "P14", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_report_is_stable_modulo_timing() {
    let path = fixture("p1_bad.hop");
    let norm = |o: &Output| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let a = run(&["verify", "--json", path.to_str().unwrap()]);
    let b = run(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(norm(&a), norm(&b));
}

#[test]
fn necessity_entry_reports_forced_and_refutations() {
    let out = run(&["necessity", "P12", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["pass"], true);
    let forced: Vec<&str> = json["forced"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["atom"].as_str().unwrap())
        .collect();
    for base in ["f1(u, v, w)", "f2(u, v, w)", "f3(u, v, w)"] {
        assert!(forced.contains(&base), "missing {base} in {forced:?}");
    }
    assert!(!json["perturbations"].as_array().unwrap().is_empty());
}

#[test]
fn necessity_fixture_flow() {
    let out = run(&[
        "necessity",
        "--fixture",
        fixture("p2_perturb.hop").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("refuted"));
    // a family file without a perturb block passes vacuously
    let out = run(&[
        "necessity",
        "--fixture",
        fixture("p1_family.hop").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn necessity_fuzz_mode_is_deterministic_and_refuted() {
    let a = run(&["necessity", "P20", "--fuzz", "6", "--seed", "7", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = run(&["necessity", "P20", "--fuzz", "6", "--seed", "7", "--json"]);
    let strip = |o: &Output| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let json = strip(&a);
    let fuzzed = json["perturbations"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["label"].as_str().unwrap().starts_with("fuzz:"))
        .count();
    assert_eq!(fuzzed, 6);
}

#[test]
fn catalog_verify_all_respects_thread_cap_and_budget() {
    let started = std::time::Instant::now();
    let out = bin()
        .args(["catalog", "verify", "--all"])
        .env("HAMCHECK_THREADS", "2")
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS: 34/34 cases pass"), "{text}");
    assert!(elapsed.as_secs_f64() < 120.0, "catalog verify --all took {elapsed:?}");
}
