use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn workbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn report(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn lattice_info_of_u() {
    let out = workbench(&["lattice", "info", "--name", "U"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["signature"], serde_json::json!([1, 1]));
    assert_eq!(v["det"], -1);
    assert_eq!(v["even"], true);
}

#[test]
fn disc_form_of_e8_minus_2() {
    let out = workbench(&["lattice", "disc-form", "--name", "E8(-2)"]);
    assert_eq!(out.status.code(), Some(0));
    let orders = stdout_json(&out)["orders"].as_array().unwrap().clone();
    assert_eq!(orders.len(), 8);
    assert!(orders.iter().all(|o| o == 2));
}

#[test]
fn lattice_from_file_and_complement() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    std::fs::write(&path, r#"{"gram": [[0, 1, 0], [1, 0, 0], [0, 0, -2]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = workbench(&["lattice", "complement", "--input", p, "--basis", "[[1, 1, 0]]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 2);
    let text = workbench(&["--format", "text", "lattice", "info", "--input", p]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("signature  (1, 2)"));
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"gram": [[1, 2]"#).unwrap();
    let out = workbench(&["lattice", "info", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "parse");
}

#[test]
fn precondition_failure_exits_3() {
    let out = workbench(&["form", "cycle", "--form", "1,1,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "precondition");
    let out = workbench(&["lattice", "overlattice", "--name", "A2", "--glue", "[[1]]"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn form_commands() {
    let out = workbench(&["form", "equivalent", "--form", "188,0,-2", "--other", "-12,-8,30"]);
    assert_eq!(stdout_json(&out)["equivalent"], true);
    let out = workbench(&["form", "reduce", "--form", "12,2,4", "--improper"]);
    assert_eq!(stdout_json(&out)["reduced"], serde_json::json!([4, 2, 12]));
    let out = workbench(&["form", "represents", "--form", "8,30,10", "--value", "2"]);
    assert_eq!(stdout_json(&out)["represents"], false);
}

#[test]
fn fm_commands() {
    let out = workbench(&["fm", "matrix", "--params", "2,3,1,1,1"]);
    let v = stdout_json(&out);
    assert_eq!(v["matrix"], serde_json::json!([[3, 12, 2], [1, 5, 1], [2, 12, 3]]));
    assert_eq!(v["preserves_pairing"], true);
    let out = workbench(&["fm", "matrix", "--params", "2,4,1,1,1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = workbench(&["fm", "twist", "--n", "-2", "--r0", "2", "--s", "3"]);
    assert_eq!(stdout_json(&out)["preserves_pairing"], true);
}

#[test]
fn involution_eigen_of_swap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inv.json");
    std::fs::write(
        &path,
        r#"{"gram": [[-2, 0], [0, -2]], "action": [[0, 1], [1, 0]]}"#,
    )
    .unwrap();
    let out = workbench(&["involution", "eigen", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["invariant"]["gram"], serde_json::json!([[-4]]));
    assert_eq!(v["anti_invariant"]["gram"], serde_json::json!([[-4]]));
}

#[test]
fn reproduce_all_claims_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(&["reproduce", "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(dir.path());
    let claims = r["claims"].as_array().unwrap();
    assert!(claims.len() >= 20);
    assert!(claims.iter().all(|c| c["status"] == "pass"));
    let ids: Vec<&str> = claims.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(dir.path().join("report.md").exists());

    // deterministic output
    let again = tempfile::tempdir().unwrap();
    workbench(&["reproduce", "--outdir", again.path().to_str().unwrap()]);
    assert_eq!(
        std::fs::read(dir.path().join("report.json")).unwrap(),
        std::fs::read(again.path().join("report.json")).unwrap()
    );
}

#[test]
fn reproduce_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = workbench(&["reproduce", "--outdir", dir.path().to_str().unwrap(), "--filter", "e8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    let claims = r["claims"].as_array().unwrap();
    assert!(!claims.is_empty());
    assert!(claims.iter().all(|c| c["id"].as_str().unwrap().contains("e8")));

    let out = workbench(&["reproduce", "--outdir", dir.path().to_str().unwrap(), "--filter", "nothing-matches"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reproduce_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = workbench(&["reproduce", "--outdir", d, "--filter", "e8", "--inject-fault", "e8.element-counts"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert_eq!(r["injected_fault"], "e8.element-counts");
    for c in r["claims"].as_array().unwrap() {
        let faulty = c["id"] == "e8.element-counts";
        assert_eq!(c["status"] != "pass", faulty, "{}", c["id"]);
    }
    let out = workbench(&["reproduce", "--outdir", d, "--inject-fault", "no.such-claim"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn node_cap_env_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["reproduce", "--outdir", dir.path().to_str().unwrap(), "--filter", "stable"])
        .env("WORKBENCH_NODE_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
