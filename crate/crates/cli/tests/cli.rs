use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_persist-reduce"))
}

fn run(args: &[&str]) -> Output {
    bin().env_remove("PERSIST_REDUCE_THREADS").args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn circle(dir: &Path) -> (String, String) {
    (
        write(dir, "x.csv", "1,0,0.70710678118654752\n0,1,0.70710678118654752\n"),
        write(dir, "y.csv", "0.6\n0.8\n"),
    )
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reduce_circle_is_valid() {
    let d = TempDir::new().unwrap();
    let (x, y) = circle(d.path());
    let out = run(&["reduce", "--x", &x, "--y", &y, "--loss", "ls", "--eta", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kept"], serde_json::json!([2, 3]));
    assert_eq!(v["valid"], Value::Bool(true));
}

#[test]
fn reduce_large_eta_writes_report_and_exits_3() {
    let d = TempDir::new().unwrap();
    let (x, y) = circle(d.path());
    let report = d.path().join("r.json");
    let out = run(&[
        "reduce", "--x", &x, "--y", &y, "--loss", "ls", "--eta", "10", "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = read_json(&report);
    assert_eq!(v["valid"], Value::Bool(false));
    assert_eq!(v["violations"], serde_json::json!(["eta-out-of-interval"]));
}

#[test]
fn reduce_report_round_trips() {
    let d = TempDir::new().unwrap();
    let (x, y) = circle(d.path());
    let out = run(&["reduce", "--x", &x, "--y", &y, "--loss", "ls", "--eta", "0.01"]);
    let doc: persist_core::json::ReductionReportDoc = serde_json::from_slice(&out.stdout).unwrap();
    let again = persist_core::json::to_json_string(&doc).unwrap();
    assert_eq!(again.as_bytes(), &out.stdout[..]);
}

#[test]
fn reduce_missing_file_exits_1() {
    let d = TempDir::new().unwrap();
    let (_, y) = circle(d.path());
    let out = run(&["reduce", "--x", "/nonexistent/x.csv", "--y", &y, "--loss", "ls", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_input_exits_2() {
    let d = TempDir::new().unwrap();
    let x = write(d.path(), "x.csv", "1,abc\n0,1\n");
    let y = write(d.path(), "y.csv", "1\n0\n");
    let out = run(&["reduce", "--x", &x, "--y", &y, "--loss", "ls", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["extray", "--z", "z.csv", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lqq_without_q_exits_2() {
    let d = TempDir::new().unwrap();
    let (x, y) = circle(d.path());
    let out = run(&["reduce", "--x", &x, "--y", &y, "--loss", "lqq", "--eta", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extray_three_rays_both_algorithms() {
    let d = TempDir::new().unwrap();
    let z = write(d.path(), "z.csv", "1,0,1\n0,1,1\n");
    let g = write(d.path(), "g.csv", "1\n1\n");
    let a = run(&["extray", "--z", &z, "--g", &g]);
    let b = run(&["extray", "--z", &z, "--brute"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(json(&a)["kept"], serde_json::json!([1, 2]));
    assert_eq!(json(&a)["kept"], json(&b)["kept"]);
}

#[test]
fn extray_line_exits_4() {
    let d = TempDir::new().unwrap();
    let z = write(d.path(), "z.csv", "1,-1\n0,0\n");
    assert_eq!(run(&["extray", "--z", &z]).status.code(), Some(4));
}

#[test]
fn solve_toy() {
    let d = TempDir::new().unwrap();
    let x = write(d.path(), "x.csv", "1\n0\n");
    let y = write(d.path(), "y.csv", "1\n0\n");
    let out = run(&["solve", "--x", &x, "--y", &y, "--eta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let beta = json(&out)["beta"][0].as_f64().unwrap();
    assert!((beta - 0.5).abs() < 1e-12);
}

#[test]
fn solve_lasso_signed() {
    let d = TempDir::new().unwrap();
    let x = write(d.path(), "x.csv", "1,0\n0,1\n");
    let y = write(d.path(), "y.csv", "-1\n0\n");
    let out = run(&["solve", "--x", &x, "--y", &y, "--eta", "0.1", "--method", "lasso"]);
    assert_eq!(out.status.code(), Some(0));
    let beta = json(&out)["beta"][0].as_f64().unwrap();
    assert!((beta + 0.95).abs() < 1e-10);
}

#[test]
fn geom_facets_square() {
    let d = TempDir::new().unwrap();
    let v = write(d.path(), "v.csv", "1,-1,-1,1\n1,1,-1,-1\n");
    let out = run(&["geom", "--facets", "--v", &v]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["offsets"].as_array().unwrap().len(), 4);
}

#[test]
fn geom_flat_polytope_exits_4() {
    let d = TempDir::new().unwrap();
    let v = write(d.path(), "v.csv", "0,1,2\n0,1,2\n");
    assert_eq!(run(&["geom", "--facets", "--v", &v]).status.code(), Some(4));
}

#[test]
fn geom_gauge() {
    let d = TempDir::new().unwrap();
    let m = write(d.path(), "m.csv", "1,-1,-1,1\n1,1,-1,-1\n");
    let t = write(d.path(), "t.csv", "2\n0\n");
    let out = run(&["geom", "--gauge", "--m", &m, "--theta", &t]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn geom_requires_an_operation() {
    assert_eq!(run(&["geom"]).status.code(), Some(2));
}

#[test]
fn cv_writes_path_csv() {
    let d = TempDir::new().unwrap();
    let x = write(
        d.path(),
        "x.csv",
        "0.5,0.1,0.3\n0.5,-0.2,0.1\n0.5,0.4,-0.6\n0.5,0.3,0.2\n0.5,-0.8,0.7\n",
    );
    let y = write(d.path(), "y.csv", "0.6\n0.4\n0.5\n0.45\n0.2\n");
    let path = d.path().join("path.csv");
    let out = run(&[
        "cv", "--x", &x, "--y", &y, "--seed", "7", "--n-eta", "20", "--path-csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["eta_grid"].as_array().unwrap().len(), 20);
    let rows = std::fs::read_to_string(&path).unwrap();
    assert_eq!(rows.lines().count(), 20);
    assert_eq!(rows.lines().next().unwrap().split(',').count(), 4);
}

#[test]
fn exp_requires_seed() {
    let d = TempDir::new().unwrap();
    let out = run(&["exp", "etacv", "--out-dir", d.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exp_etacv_artifacts_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let common = [
        "exp", "etacv", "--seed", "11", "--trials", "3", "--n-list", "10,12", "--p-list",
        "20,40", "--n-eta", "20",
    ];
    let mut args_a: Vec<&str> = common.to_vec();
    args_a.extend(["--out-dir", a.path().to_str().unwrap(), "--threads", "1"]);
    let mut args_b: Vec<&str> = common.to_vec();
    args_b.extend(["--out-dir", b.path().to_str().unwrap(), "--threads", "3"]);
    assert_eq!(run(&args_a).status.code(), Some(0));
    assert_eq!(run(&args_b).status.code(), Some(0));
    for f in ["heatmap.pgm", "fractions.csv", "manifest.json", "reference_lines.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs across thread counts");
    }
    let pgm = std::fs::read_to_string(a.path().join("heatmap.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n2 2\n255\n"));
    let manifest = read_json(&a.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 11);
}

#[test]
fn exp_raycount_csv() {
    let d = TempDir::new().unwrap();
    let out = run(&[
        "exp", "raycount", "--seed", "3", "--trials", "1", "--p-list", "20,40", "--out-dir",
        d.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.path().join("raycount.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,p,mean_extreme,sd,trials"));
    for l in lines {
        assert_eq!(l.split(',').nth(3), Some("0.0000000000000000e0"));
    }
}

#[test]
fn descending_p_list_exits_2() {
    let d = TempDir::new().unwrap();
    let out = run(&[
        "exp", "bench", "--seed", "1", "--p-list", "100,50", "--out-dir",
        d.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_env_var_is_validated() {
    let out = bin()
        .env("PERSIST_REDUCE_THREADS", "many")
        .args(["geom", "--interior", "--x", "x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
