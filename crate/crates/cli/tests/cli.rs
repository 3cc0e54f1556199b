use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genpoisson")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_su3_quintic_structure() {
    let out = run(&["--no-timing", "verify", "--algebra", "su3", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["order"], 5);
    assert_eq!(v["residual_nonzero_count"], 0);
    assert_eq!(v["snb_nonzero_count"], 0);
    assert_eq!(v["verified"], true);
    assert_eq!(v["normalization"]["half_epsilon_dcc_over_cocycle"], "12");
    assert!(v.get("timing").is_none());
}

#[test]
fn output_is_deterministic_without_timing() {
    let args = ["--no-timing", "verify", "--algebra", "su3", "--p", "2"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_genpoisson"))
        .args(args)
        .env("GPS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_present_by_default() {
    let v = json(&run(&["verify", "--algebra", "su2"]));
    assert!(v["timing"]["elapsed_s"].is_number());
}

#[test]
fn perturbed_ternary_bracket_fails() {
    let out = run(&["--no-timing", "verify", "--algebra", "su3", "--m", "2", "--perturb", "1,2,3=+1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verified"], false);
    assert_eq!(v["certificates_agree"], true);
    assert!(v["residual_nonzero_count"].as_u64().unwrap() > 0);
}

#[test]
fn perturbed_five_bracket_on_su3_still_closes() {
    // every 5-form in eight variables satisfies the identity
    let out = run(&["--no-timing", "verify", "--algebra", "su3", "--m", "3", "--perturb", "1,2,3,4,5=+1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["residual_nonzero_count"], 0);
}

#[test]
fn su2_bracket_of_coordinates() {
    let out = run(&["bracket", "--algebra", "su2", "--args", "x1", "x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "x3");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bracket", "--algebra", "su2", "--args", "x1+", "x2"][..],
        &["bracket", "--algebra", "su2", "--args", "x1"],
        &["verify", "--algebra", "g2"],
        &["verify", "--algebra", "su3", "--m", "3", "--p", "1"],
        &["verify", "--algebra", "su3", "--perturb", "1,2=1"],
        &["verify", "--algebra", "su3", "--perturb", "1,2,9=1"],
        &["--radicand", "2", "verify", "--algebra", "su3"],
        &["verify", "--algebra", "su2", "--m", "3"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_genpoisson"))
        .args(["verify", "--algebra", "su2"])
        .env("GPS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compat_reports_residual() {
    let ok = run(&["--no-timing", "compat", "--algebra", "su3", "--m1", "2", "--m2", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["compatible"], true);
    let bad = run(&["--no-timing", "compat", "--algebra", "su3", "--m1", "2", "--m2", "2", "--perturb", "1,2,4=1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn cocycle_dump_round_trips() {
    let out = run(&["cocycle", "--algebra", "su3", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let t = genpoisson::ExactTensor::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(t.rank(), 5);
    assert!(t.is_fully_antisymmetric());
    let ps = run(&["cocycle", "--algebra", "su3", "--m", "3", "--permsum"]);
    let q = genpoisson::ExactTensor::from_json(std::str::from_utf8(&ps.stdout).unwrap()).unwrap();
    assert_eq!(q.proportionality(&t), Some(genpoisson::ExactScalar::from_int(120)));
}

#[test]
fn evolve_writes_csv_and_summary() {
    let dir = std::env::temp_dir().join(format!("genpoisson-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("traj.csv");
    let out = run(&[
        "--no-timing",
        "evolve",
        "--algebra",
        "su3",
        "--m",
        "3",
        "--hamiltonians",
        "x1,x4,x8",
        "--x0",
        "1/2,-1/3,0.4,0.75,-5/7,1/6,4/9,-2/11",
        "--dt",
        "0.01",
        "--steps",
        "50",
        "--monitors",
        "x1^2+x2^2+x3^2+x4^2+x5^2+x6^2+x7^2+x8^2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["max_drift"]["H1"]["max_abs_drift"], 0.0);
    assert!(v["max_drift"]["M1"]["max_rel_drift"].as_f64().unwrap() < 1e-12);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x1,x2,x3,x4,x5,x6,x7,x8,H1_drift,H2_drift,H3_drift,M1_drift");
    assert_eq!(lines.count(), 51);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evolve_rejects_wrong_hamiltonian_count() {
    let out = run(&["evolve", "--algebra", "su3", "--m", "3", "--hamiltonians", "x1,x2", "--x0", "1,1,1,1,1,1,1,1", "--dt", "0.1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn four_commutator_oracle() {
    let out = run(&["oracle", "four-commutator", "--algebra", "su3", "--indices", "1,2,3,4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["in_algebra"], true);
    assert_eq!(v["components"].as_array().unwrap().len(), 8);
    assert_eq!(v["components"][4], "-3/4");
}

#[test]
fn structure_constants_oracle_matches_catalog() {
    let out = run(&["oracle", "structure-constants", "--algebra", "su2"]);
    let t = genpoisson::ExactTensor::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(t, genpoisson::liealg::catalog_load("su2").unwrap().structure);
}
