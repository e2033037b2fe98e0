use std::path::Path;
use std::process::{Command, Output};

use monogamy_core::{entropy, io};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn catalog(dir: &TempDir, args: &[&str], name: &str) -> String {
    let out = path(dir, name);
    let mut full = vec!["catalog"];
    full.extend(args);
    full.extend(["--out", &out]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn strip_wall_clock(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_ms");
            m.values_mut().for_each(strip_wall_clock);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_wall_clock),
        _ => {}
    }
}

#[test]
fn catalog_then_entropy_matches_library() {
    let dir = TempDir::new().unwrap();
    let file = catalog(&dir, &["ginibre", "--dims", "2,3", "--rank", "3", "--seed", "11"], "g.json");
    let o = run(&["compute", "entropy", "--state", &file, "--part", "B"]);
    assert_eq!(code(&o), 0);
    let reported = json_stdout(&o)["value"].as_f64().unwrap();
    let state = io::read_state(Path::new(&file)).unwrap().to_density();
    assert_eq!(reported, entropy::marginal_entropy(&state, &["B"]).unwrap());
}

#[test]
fn part_selects_the_marginal() {
    let dir = TempDir::new().unwrap();
    let file = catalog(&dir, &["ghz"], "ghz.json");
    let o = run(&["compute", "mi", "--state", &file, "--part", "A,C"]);
    assert_eq!(code(&o), 0);
    assert!((json_stdout(&o)["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let o = run(&["compute", "wootters", "--state", &file, "--part", "B,C"]);
    assert_eq!(code(&o), 0);
    assert!(json_stdout(&o)["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let werner = catalog(&dir, &["werner", "--p", "0.5"], "w.json");

    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
    assert_eq!(code(&run(&["compute", "entropy", "--state", &bad])), 2);
    assert_eq!(code(&run(&["compute", "entropy", "--state", &path(&dir, "missing.json")])), 2);

    assert_eq!(code(&run(&["compute", "frobenius", "--state", &werner])), 3);
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 3);
    assert_eq!(code(&run(&["catalog", "nope"])), 3);

    assert_eq!(code(&run(&["compute", "mi", "--state", &werner, "--part", "A,Z"])), 4);
    let qutrits = catalog(&dir, &["ginibre", "--dims", "3,3", "--seed", "2"], "q.json");
    assert_eq!(code(&run(&["compute", "wootters", "--state", &qutrits])), 4);

    // a bipartite input to a tripartite suite is a failed trial, not a crash
    let o = run(&["verify", "--suite", "cor1", "--state", &werner, "--format", "text"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall: FAIL"));
}

#[test]
fn antisymmetric_suite_passes() {
    let o = run(&["verify", "--suite", "antisym", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v = json_stdout(&o);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["soundness_breaches"].as_u64(), Some(0));
}

#[test]
fn out_file_gets_report_and_stdout_gets_summary() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "ssa.json");
    let o = run(&["verify", "--suite", "ssa", "--seed", "4", "--out", &out]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall: PASS"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn identical_runs_give_identical_reports() {
    let args = ["verify", "--suite", "ssa", "--suite", "chain", "--seed", "9", "--seed", "10", "--budget", "500"];
    let mut a = json_stdout(&run(&args));
    let mut b = json_stdout(&run(&args));
    strip_wall_clock(&mut a);
    strip_wall_clock(&mut b);
    assert_eq!(a, b);

    let dir = TempDir::new().unwrap();
    let f = catalog(&dir, &["werner", "--p", "0.8"], "w.json");
    let eof = ["compute", "eof", "--state", &f, "--budget", "2000", "--seed", "5"];
    assert_eq!(run(&eof).stdout, run(&eof).stdout);
}
