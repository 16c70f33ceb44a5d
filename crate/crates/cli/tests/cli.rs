use serde_json::Value;
use std::process::{Command, Output};

fn sixv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixv")).args(args).output().expect("binary runs")
}

fn sixv_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixv")).env("SIXV_THREADS", threads).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn compute_r_spin_half_csv() {
    let o = sixv(&["compute-r", "--I", "1", "--J", "1", "--route", "single", "--p", "1/2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,i_out,j_out,numerator,denominator"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows.iter().filter(|r| r[4] != "0").count(), 6);
}

#[test]
fn compute_r_routes_agree() {
    let run = |route| sixv(&["compute-r", "--I", "2", "--J", "1", "--route", route, "--p", "1/3", "--lambda", "4/7"]).stdout;
    let single = run("single");
    assert_eq!(single, run("double"));
    assert_eq!(single, run("pole"));
}

#[test]
fn compute_r_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = sixv(&["compute-r", "--I", "1", "--J", "x=2/9", "--max-total", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn verify_ybe_reports_exact_zero() {
    let o = sixv(&["verify-ybe", "--I1", "1", "--I2", "1", "--I3", "1", "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let r = &v[0];
    assert_eq!(r["residual_kind"], "ExactZero");
    assert_eq!(r["params"]["q"], "1/4");
    for k in ["name", "params", "residual_kind", "max_abs", "seconds"] {
        assert!(r.get(k).is_some(), "{k}");
    }
    let o = sixv(&["verify-ybe", "--form", "l-operator", "--I1", "1", "--I2", "x=3/7", "--p", "1/2", "--max-total", "2"]);
    assert_eq!(json(&o)[0]["residual_kind"], "ExactZero");
}

#[test]
fn verify_tetra_small() {
    let o = sixv(&["verify-tetra", "--max-index", "1", "--q", "1/2", "--random", "5", "--seed", "3"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v[0]["residual_kind"], "ExactZero");
    assert_eq!(v[0]["params"]["tuples"], "4101");
}

#[test]
fn symmetries_and_recurrences() {
    let o = sixv(&["verify-symmetries", "--I", "1", "--J", "2", "--p", "1/2"]);
    assert!(o.status.success());
    assert_eq!(json(&o).as_array().unwrap().len(), 4);
    let o = sixv(&["verify-recurrences", "--I", "2", "--J", "2", "--p", "1/2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[3]["params"]["unique"], "true");
}

#[test]
fn build_blocks() {
    let o = sixv(&["build-q", "--sign", "plus", "--I", "1", "--M", "2", "--sector", "1", "--p", "1/3"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 4);
    let o = sixv(&["build-transfer", "--kind", "hat", "--J", "x=4/9", "--I", "1", "--M", "2", "--sector", "0", "--p", "1/3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = sixv(&["build-transfer", "--kind", "finite", "--J", "0", "--I", "1", "--M", "2", "--sector", "1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let diag: Vec<&str> = text.lines().skip(1).filter(|l| l.ends_with(",1,1")).collect();
    assert_eq!(diag.len(), 2);
}

#[test]
fn funcrel_output_is_independent_of_threads() {
    let args = ["verify-funcrel", "--suite", "tq", "--grid", "small", "--p", "1/3", "--lambda", "5/7", "--phi", "1/5", "--no-timing"];
    let a = sixv_threads(&args, "1");
    let b = sixv_threads(&args, "3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).as_array().unwrap().iter().all(|r| r["residual_kind"] == "ExactZero"));
}

#[test]
fn bethe_spin_half() {
    let o = sixv(&["bethe", "--I", "1", "--M", "2", "--sector", "1", "--q", "1/2", "--phi", "9/10"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v[0]["report"]["residual_kind"], "NumericPass");
    let states = v[0]["roots"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    for s in states {
        assert_eq!(s["plus_roots"].as_array().unwrap().len(), 1);
        assert_eq!(s["minus_roots"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(sixv(&["verify-ybe", "--I1", "1"]).status.code(), Some(2));
    assert_eq!(sixv(&["compute-r", "--I", "1", "--J", "1", "--p", "1/0"]).status.code(), Some(3));
    assert_eq!(sixv(&["build-q", "--sign", "minus", "--I", "x=2/7", "--M", "1", "--sector", "0"]).status.code(), Some(3));
    assert_eq!(sixv(&["compute-r", "--I", "1", "--J", "1", "--route", "nine"]).status.code(), Some(3));
}
