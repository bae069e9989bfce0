mod common;

use std::process::{Command, Output};

use serde_json::Value;

use common::data;

fn hodgevar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgevar"))
        .args(args)
        .output()
        .expect("run hodgevar")
}

fn path(stem: &str) -> String {
    data(stem).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cohomology_table_lists_bc_dimensions() {
    let o = hodgevar(&["cohomology", &path("iwasawa"), "--theory", "bc"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text
        .lines()
        .find(|l| l.split_whitespace().take(3).collect::<Vec<_>>() == ["bc", "1", "0"])
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(row, ["bc", "1", "0", "1", "2"]);
}

#[test]
fn torus_cohomology_is_all_ones() {
    let o = hodgevar(&["cohomology", &path("torus1"), "--theory", "all", "--out", "json", "--backend", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for g in v["groups"].as_array().unwrap() {
        let expected = if g["theory"] == "derham" && g["k"] == 1 { 2 } else { 1 };
        assert_eq!(g["dim"], expected, "{g}");
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let o = hodgevar(&["cohomology", "/nonexistent/model.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.json"));
}

#[test]
fn schema_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{\n  \"name\": \"x\",\n  \"n\": 1,\n  \"d_omega\": [[]],\n  \"colour\": 3\n}\n").unwrap();
    let o = hodgevar(&["cohomology", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json:5:"));
}

#[test]
fn non_integrable_model_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    let spec = hodgevar::io::ModelFile::from_spec(&hodgevar_core::corpus::broken_spec());
    std::fs::write(&file, serde_json::to_string(&spec).unwrap()).unwrap();
    let o = hodgevar(&["ddbar-check", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DSquared"));
}

#[test]
fn grid_outside_radius_is_rejected() {
    let o = hodgevar(&["deform", &path("torus1"), &path("torus1-shear"), "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ddbar_check_flags_iwasawa() {
    let o = hodgevar(&["ddbar-check", &path("iwasawa"), "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], false);
    let o = hodgevar(&["ddbar-check", &path("torus2"), "--out", "json", "--backend", "exact"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn verify_torus_family_passes() {
    let o = hodgevar(&["verify", &path("torus1"), &path("torus1-shear"), "--all", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), hodgevar::verify::CHECKS.len());
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn dimension_identity_on_iwasawa_reports_jumps() {
    let o = hodgevar(&[
        "verify",
        &path("iwasawa"),
        &path("iwasawa-shear"),
        "--check",
        "dimension-identity",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let check = &v["checks"][0];
    assert_eq!(check["status"], "pass");
    let notes: Vec<&str> = check["notes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(notes.iter().any(|n| n.contains("(2,0)") && n.contains("v=1")), "{notes:?}");
}

#[test]
fn gated_check_needs_flag_on_iwasawa() {
    let args = ["verify", &path("iwasawa"), &path("iwasawa-shear"), "--check", "transversality"];
    let strict = hodgevar(&args);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("∂∂̄ hypothesis fails"));
    let mut relaxed_args = args.to_vec();
    relaxed_args.push("--allow-non-ddbar");
    let relaxed = hodgevar(&relaxed_args);
    assert_eq!(relaxed.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&relaxed.stderr).contains("∂∂̄ hypothesis fails"));
    assert!(stdout(&relaxed).contains("info"));
    assert!(stdout(&relaxed).contains("outside-lower-step"));
}

#[test]
fn verify_requires_a_selection() {
    let o = hodgevar(&["verify", &path("torus1"), &path("torus1-shear")]);
    assert_eq!(o.status.code(), Some(2));
    let o = hodgevar(&["verify", &path("torus1"), &path("torus1-shear"), "--check", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn period_torus_line_is_one_t() {
    let o = hodgevar(&[
        "period",
        &path("torus1"),
        &path("torus1-shear"),
        "--p",
        "1",
        "--k",
        "1",
        "--grid",
        "0,0.05,-0.1,0.05i",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r["status"], "ok");
        assert_eq!(r["dims"]["f"], 1);
        assert_eq!(r["dims"]["b"], 2);
        let t = &r["t"][0];
        let aff = &r["affine"];
        assert_eq!(aff[0][0].as_f64().unwrap(), 1.0);
        assert!((aff[1][0].as_f64().unwrap() - t[0].as_f64().unwrap()).abs() < 1e-10);
        assert!((aff[1][1].as_f64().unwrap() - t[1].as_f64().unwrap()).abs() < 1e-10);
        let pl = r["pluecker"].as_array().unwrap();
        let norm: f64 = pl
            .iter()
            .map(|z| z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2))
            .sum();
        assert!((norm - 1.0).abs() < 1e-10);
        for key in ["holomorphy", "transversality", "diagram"] {
            assert!(r["residuals"][key].is_number(), "{key}");
        }
    }
    // Sorted by t.
    let ts: Vec<f64> = rows.iter().map(|r| r["t"][0][0].as_f64().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn period_flags_degenerate_frame() {
    let o = hodgevar(&[
        "period",
        &path("torus1"),
        &path("torus1-shear"),
        "--p",
        "1",
        "--k",
        "1",
        "--grid",
        "0,1",
        "--radius",
        "2",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["status"], "ok");
    assert_eq!(rows[1]["status"], "frame-degenerate");
    assert!(rows[1]["residuals"]["holomorphy"].is_null());
}

#[test]
fn period_csv_trajectories() {
    let o = hodgevar(&[
        "period",
        &path("torus1"),
        &path("torus1-shear"),
        "--p",
        "1",
        "--k",
        "1",
        "--grid",
        "0,0.01",
        "--out",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,p,k,index,re,im"));
    assert_eq!(lines.clone().count(), 4);
    assert!(lines.any(|l| l == "(0.01),1,1,1,1e-2,0"));
}

#[test]
fn deform_reports_tables_and_canonical_series() {
    let o = hodgevar(&["deform", &path("iwasawa"), &path("iwasawa-shear"), "--grid", "0,0.05", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let jump = pts[1]["bidegrees"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["p"] == 2 && e["q"] == 0)
        .unwrap();
    assert_eq!(jump["h_bc"], 3);
    assert_eq!(jump["h_bc_phi"], 2);
    assert_eq!(jump["v"], 1);
    for c in v["canonical"].as_array().unwrap() {
        assert!(c["fixed_point_residual"].as_f64().unwrap() < 1e-10);
        assert_eq!(c["convergence"].as_array().unwrap().len(), 7);
    }
}

#[test]
fn order_flag_overrides_family_truncation() {
    let o = hodgevar(&["deform", &path("torus1"), &path("torus1-shear"), "--order", "3", "--out", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 3);
}

#[test]
fn output_file_receives_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let o = hodgevar(&["cohomology", &path("torus2"), "--out", "json", "--output", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(v["model"], "torus2");
}

#[test]
fn seed_is_recorded() {
    let o = hodgevar(&[
        "verify",
        &path("torus2"),
        &path("torus2-linear"),
        "--check",
        "ddbar-decomposition",
        "--seed",
        "7",
        "--out",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 7);
}
