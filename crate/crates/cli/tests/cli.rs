use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const MATERIAL: &str = r#"{"mu":1.0,"lambda":1.0,"mu_c":0.5,"L_c":0.1,"b1":1.0,"b2":1.0,"b3":1.0,"h":0.05}"#;

fn write_scenario(dir: &Path, name: &str, surface: &str, deformation: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    let text = format!(
        r#"{{"schema_version":1,"surface":{surface},"deformation":{deformation},"material":{MATERIAL},"sample_points":[[0.3,0.5],[0.6,0.4]]{extra}}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn plate(dir: &Path) -> PathBuf {
    write_scenario(dir, "plate.json", r#"{"kind":"plate","params":{}}"#, r#"{"kind":"identity"}"#, "")
}

fn cylinder(dir: &Path) -> PathBuf {
    write_scenario(
        dir,
        "cyl.json",
        r#"{"kind":"cylinder","params":{"radius":1.0}}"#,
        r#"{"kind":"radial_expansion","params":{"epsilon":0.2}}"#,
        "",
    )
}

fn run(args: &[&str], scenario: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shellstrain"));
    cmd.args(args);
    if let Some(p) = scenario {
        cmd.arg("--scenario").arg(p);
    }
    cmd.output().expect("failed to run shellstrain")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()).collect()
}

fn usage_failure(out: &Output) {
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    assert!(err.starts_with("error: "));
}

#[test]
fn frame_on_flat_plate() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["frame", "--point", "0.5,0.5"], Some(&plate(dir.path()))));
    let p = &v["points"][0];
    assert_eq!(matrix(&p["I"]), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert_eq!(matrix(&p["II"]), vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
    assert_eq!(p["n"], serde_json::json!([0.0, 0.0, 1.0]));
    assert_eq!(v["scenario"], "plate/identity/matched");
}

#[test]
fn deformed_cylinder_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["frame", "--model", "deformed"], Some(&cylinder(dir.path()))));
    // radius 1.2 after the expansion
    for p in v["points"].as_array().unwrap() {
        assert!((p["H"].as_f64().unwrap().abs() - 0.5 / 1.2).abs() < 1e-9);
        assert!(p["K"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn constrained_bending_vanishes_under_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["strains", "--model", "constrained"], Some(&cylinder(dir.path()))));
    for p in v["points"].as_array().unwrap() {
        assert!(p["norms"]["R_KSB"].as_f64().unwrap() < 1e-8);
        assert!(p["norms"]["R_inf_flat"].as_f64().unwrap() < 1e-8);
        assert!(p["norms"]["G_inf"].as_f64().unwrap() > 0.1);
    }
}

#[test]
fn verify_all_passes_on_cylinder() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["verify", "--suite", "all"], Some(&cylinder(dir.path()))));
    let reports = v.as_array().unwrap();
    assert!(reports.len() >= 6);
    for r in reports {
        assert_eq!(r["verdict"], "pass", "{}", r["check_id"]);
    }
}

#[test]
fn verify_single_check_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rigid = write_scenario(
        dir.path(),
        "rigid.json",
        r#"{"kind":"sphere","params":{"radius":2.0}}"#,
        r#"{"kind":"rigid","params":{"rotation":[0.3,-0.2,0.9],"translation":[1,0,2]}}"#,
        "",
    );
    usage_failure(&run(&["verify", "--suite", "rigid_vanishing"], Some(&plate(dir.path()))));
    let out = run(&["verify", "--suite", "rigid_vanishing", "--output", "csv"], Some(&rigid));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check_id,scenario,label,x1,x2,value,bound,relation,normalized,verdict");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("rigid_vanishing,") && r.ends_with(",pass")));
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "scaling_suite", "--tol", "scaling=1e-300"], Some(&cylinder(dir.path())));
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["verdict"], "fail");
}

#[test]
fn bad_inputs_exit_two_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write_scenario(dir.path(), "extra.json", r#"{"kind":"plate"}"#, r#"{"kind":"identity"}"#, r#","colour":1"#);
    usage_failure(&run(&["frame"], Some(&extra)));
    let cyl = cylinder(dir.path());
    usage_failure(&run(&["strains", "--model", "kirchhoff"], Some(&cyl)));
    usage_failure(&run(&["verify", "--tol", "rigid"], Some(&cyl)));
    usage_failure(&run(&["verify", "--suite", "nothing"], Some(&cyl)));
    usage_failure(&run(&["frame", "--point", "9,9"], Some(&cyl)));
    usage_failure(&run(&["energy", "--quad-order", "40"], Some(&cyl)));
    usage_failure(&run(&["frame"], None));
    usage_failure(&run(&["frame"], Some(&dir.path().join("missing.json"))));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cyl = cylinder(dir.path());
    for args in [&["strains", "--model", "cosserat"][..], &["energy"], &["table"]] {
        let a = run(args, Some(&cyl));
        let b = run(args, Some(&cyl));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("frame.json");
    let out = run(&["frame", "--out", target.to_str().unwrap()], Some(&plate(dir.path())));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
}

#[test]
fn grid_replaces_sample_points() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["frame", "--grid", "3x2"], Some(&plate(dir.path()))));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 6);
    assert_eq!(pts[0]["point"], serde_json::json!([1.0 / 6.0, 0.25]));
}

#[test]
fn energy_vanishes_at_reference() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(&["energy", "--grid", "4x4"], Some(&plate(dir.path()))));
    assert_eq!(v["quadrature"]["cells"], serde_json::json!([4, 4]));
    assert!(v["breakdown"]["total"].as_f64().unwrap().abs() < 1e-14);
    let k = json(&run(&["energy", "--model", "koiter"], Some(&cylinder(dir.path()))));
    assert!(k["total"].as_f64().unwrap() > 0.0);
}

#[test]
fn minimize_under_normal_load() {
    let dir = tempfile::tempdir().unwrap();
    let loaded =
        write_scenario(dir.path(), "loaded.json", r#"{"kind":"plate"}"#, r#"{"kind":"identity"}"#, r#","load":[0,0,1]"#);
    let v = json(&run(&["minimize", "--grid", "6x6"], Some(&loaded)));
    let report = &v["report"];
    assert!(report["grad_norm"].as_f64().unwrap() <= 1e-6);
    let trace: Vec<f64> = report["energy_trace"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    for s in v["samples"].as_array().unwrap() {
        assert!(s["displacement"][2].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn tables_on_plate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        "bent.json",
        r#"{"kind":"plate"}"#,
        r#"{"kind":"random","params":{"seed":4,"amplitude":0.05}}"#,
        "",
    );
    let v = json(&run(&["table"], Some(&p)));
    let tables = v["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 7);
    let residuals: Vec<&Value> = tables
        .iter()
        .flat_map(|t| t["cells"].as_array().unwrap())
        .filter(|c| c["kind"] == "residual")
        .collect();
    assert!(residuals.len() >= 15);
    for c in residuals {
        assert!(c["value"].as_f64().unwrap() < 1e-8, "{}", c["name"]);
    }
}

#[test]
fn pretty_output_is_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["frame", "--output", "pretty", "--point", "0.5,0.5"], Some(&plate(dir.path())));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scenario: plate/identity/matched"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn help_and_version() {
    let out = run(&["--help"], None);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
    assert!(run(&["--version"], None).status.success());
}
