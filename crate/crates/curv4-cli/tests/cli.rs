//! End-to-end tests of the `curv4` binary: schemas, exit codes, CSV output
//! and cross-worker determinism.

use std::process::{Command, Output};

fn curv4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curv4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn catalog_cylinder_entry() {
    let v = stdout_json(&curv4(&["catalog", "s3xr"]));
    assert_eq!(v["format"], "curv4.catalog.v1");
    let entry = &v["entries"][0];
    assert_eq!(entry["name"], "s3xr");
    assert_eq!(entry["report"]["P"], 0.0);
    assert_eq!(entry["report"]["wpic_ratio"], 0.25);
    // full listing has all five models
    let all = stdout_json(&curv4(&["catalog"]));
    assert_eq!(all["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn unknown_model_is_not_found_exit_2() {
    let out = curv4(&["catalog", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "not-found");
    assert!(v["detail"].as_str().unwrap().contains("s3xr"));
}

#[test]
fn malformed_input_is_invalid_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("malformed.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let out = curv4(&["decompose", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "invalid-input");
    assert!(v["detail"].is_string());
}

#[test]
fn domain_error_is_exit_3() {
    let out = curv4(&["extremal", "--s-fixed", "-4"]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "domain-error");
}

#[test]
fn unknown_flags_are_rejected() {
    let out = curv4(&["catalog", "--bogus"]);
    assert!(!out.status.success());
    // both input sources at once violate the exactly-one rule
    let out = curv4(&["pinch", "--model", "s4", "--in", "x.json"]);
    assert!(!out.status.success());
    // no input source at all
    let out = curv4(&["pinch"]);
    assert!(!out.status.success());
}

#[test]
fn decompose_converts_between_representations() {
    let dir = tempfile::tempdir().unwrap();

    // model -> riemann file
    let out = curv4(&["decompose", "--model", "s4", "--to", "riemann"]);
    let riemann = stdout_json(&out);
    assert_eq!(riemann["format"], "curv4.riemann.v1");
    let riemann_path = dir.path().join("s4.riemann.json");
    std::fs::write(&riemann_path, out.stdout).unwrap();

    // riemann file -> blocks
    let blocks = stdout_json(&curv4(&["decompose", "--in", riemann_path.to_str().unwrap()]));
    assert_eq!(blocks["format"], "curv4.blocks.v1");
    assert_eq!(blocks["A"][0][0], 1.0);
    assert_eq!(blocks["B"][0][0], 0.0);

    // blocks file -> pinch report
    let blocks_path = dir.path().join("s4.blocks.json");
    std::fs::write(&blocks_path, serde_json::to_vec(&blocks).unwrap()).unwrap();
    let report = stdout_json(&curv4(&["pinch", "--in", blocks_path.to_str().unwrap()]));
    assert_eq!(report["format"], "curv4.report.v1");
    assert_eq!(report["pic"], true);
    assert_eq!(report["E"], 2.0);
}

#[test]
fn riemann_components_complete_by_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cyl.json");
    std::fs::write(
        &path,
        r#"{"format":"curv4.riemann.v1","components":[
            {"ijkl":[1,2,1,2],"value":1.0},
            {"ijkl":[1,3,1,3],"value":1.0},
            {"ijkl":[2,3,2,3],"value":1.0}]}"#,
    )
    .unwrap();
    let v = stdout_json(&curv4(&["pinch", "--in", path.to_str().unwrap()]));
    // unit cylinder: ratio 1/4, drop term 0
    assert_eq!(v["wpic_ratio"], 0.25);
    assert!((v["E"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn flow_csv_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("ray.csv");
    let v = stdout_json(&curv4(&[
        "flow",
        "--model",
        "s4",
        "--t-max",
        "0.3",
        "--dt",
        "1e-4",
        "--csv",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(v["format"], "curv4.flow.v1");
    assert_eq!(v["blowup_time"], serde_json::Value::Null);

    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,S,A1,A2,A3,C1,C2,C3,B1,B2,B3,wpic_ratio,E,P,rA,rC,rB"
    );
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 17);
        let t: f64 = fields[0].parse().unwrap();
        let s: f64 = fields[1].parse().unwrap();
        let want = 12.0 / (1.0 - 3.0 * t);
        assert!(
            ((s - want) / want).abs() <= 1e-5,
            "t = {t}: S = {s}, closed form {want}"
        );
        rows += 1;
    }
    assert!(rows > 10);
}

#[test]
fn sweep_is_byte_identical_across_workers() {
    let run = |workers: &str| {
        let out = curv4(&[
            "sweep", "--samples", "20000", "--seed", "7", "--workers", workers,
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("3"));

    let ids = |workers: &str| {
        let out = curv4(&[
            "identities", "--samples", "5000", "--seed", "3", "--workers", workers,
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(ids("1"), ids("4"));
}

#[test]
fn sweep_schema_and_soundness() {
    let v = stdout_json(&curv4(&["sweep", "--samples", "20000", "--seed", "2"]));
    assert_eq!(v["format"], "curv4.sweep.v1");
    assert!(v["max_p"].as_f64().unwrap() <= 1e-9);
    assert!(v["config"]["samples"].as_u64().unwrap() == 20000);
    assert!(v["argmax_blocks"]["A"].is_array());
    assert!(v["equality_hits"].is_array());
}

#[test]
fn monitor_sweeps_over_cones() {
    let v = stdout_json(&curv4(&[
        "sweep", "--cone", "pic", "--samples", "2000", "--seed", "4",
    ]));
    assert_eq!(v["format"], "curv4.monitor-sweep.v1");
    assert!(v["min_drop_term"].as_f64().unwrap() >= 0.0);
    let v = stdout_json(&curv4(&[
        "sweep", "--cone", "nonneg", "--samples", "2000", "--seed", "4",
    ]));
    assert!(v["min_inequality_residual_scaled"].as_f64().unwrap() >= -1e-5);
    assert_eq!(v["min_drop_term"], serde_json::Value::Null);
}

#[test]
fn identities_reports_three_residual_groups() {
    let v = stdout_json(&curv4(&["identities", "--samples", "1000", "--seed", "1"]));
    assert_eq!(v["format"], "curv4.identities.v1");
    let rep = &v["report"];
    for field in [
        "worst_trace_identity",
        "worst_route_equivalence",
        "worst_gradient_identity",
    ] {
        assert!(
            rep[field].as_f64().unwrap() <= 1e-9,
            "{field} = {}",
            rep[field]
        );
    }
}

#[test]
fn invariants_output_shape() {
    let v = stdout_json(&curv4(&["invariants", "--model", "s3xr"]));
    assert_eq!(v["format"], "curv4.invariants.v1");
    assert_eq!(v["S"], 12.0);
    assert_eq!(v["tri"], 96.0);
    assert_eq!(v["P_direct"], 0.0);
    assert_eq!(v["P_expansion"], 0.0);
    assert_eq!(v["spectral"]["lambda"][0], -3.0);
}

#[test]
fn every_output_carries_format_field() {
    let dir = tempfile::tempdir().unwrap();
    let blocks_path = dir.path().join("b.json");
    let blocks = stdout_json(&curv4(&["decompose", "--model", "s2xs2"]));
    std::fs::write(&blocks_path, serde_json::to_vec(&blocks).unwrap()).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["decompose", "--model", "s4"],
        vec!["invariants", "--in", blocks_path.to_str().unwrap()],
        vec!["pinch", "--model", "cp2"],
        vec!["flow", "--model", "s3xr", "--t-max", "0.01"],
        vec!["extremal"],
        vec!["catalog"],
        vec!["sweep", "--samples", "200", "--seed", "0"],
        vec!["identities", "--samples", "10", "--seed", "0"],
    ];
    for args in commands {
        let v = stdout_json(&curv4(&args));
        let f = v["format"].as_str().expect("format field present");
        assert!(f.starts_with("curv4."), "{args:?} -> {f}");
    }
}
