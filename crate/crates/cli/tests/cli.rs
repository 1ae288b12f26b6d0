use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn polyseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyseq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Writes the output of `structure build ARGS` to `dir/name`.
fn built(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["structure", "build"];
    full.extend_from_slice(args);
    let o = polyseq(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = dir.path().join(name);
    fs::write(&path, &o.stdout).unwrap();
    path
}

fn file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn core_data(name: &str) -> String {
    format!("{}/../core/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn counts_homomorphisms() {
    let dir = TempDir::new().unwrap();
    let k2 = built(&dir, "k2.json", &["graph", "complete", "2"]);
    let k3 = built(&dir, "k3.json", &["graph", "complete", "3"]);
    let o = polyseq(&["count", "--mode", "hom", "--pattern", s(&k2), "--target", s(&k3)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
    let o = polyseq(&["count", "--mode", "ind", "--pattern", s(&k3), "--target", s(&k3), "--json"]);
    assert_eq!(json(&o)["value"], "6");
    assert_eq!(json(&o)["schemaVersion"], 1);
}

#[test]
fn tournament_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let t3 = built(&dir, "t3.json", &["tournament", "3"]);
    let o = polyseq(&["structure", "show", "--in", s(&t3), "--canonical"]);
    assert_eq!(o.stdout, fs::read(&t3).unwrap());
    let o = polyseq(&["structure", "show", "--in", s(&t3)]);
    assert_eq!(json(&o)["tupleCounts"]["S"], 3);
}

#[test]
fn evaluates_formulas() {
    let dir = TempDir::new().unwrap();
    let c5 = built(&dir, "c5.json", &["graph", "cycle", "5"]);
    let o = polyseq(&["eval", "--formula", "E(x,y) & !(x = y)", "--in", s(&c5), "--vars", "x,y"]);
    assert_eq!(json(&o)["count"], 10);
    let o = polyseq(&["eval", "--formula", "E(x,", "--in", s(&c5)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).starts_with("error[formula-syntax]"), "{}", stderr(&o));
}

#[test]
fn detects_polynomials_and_counterexamples() {
    let dir = TempDir::new().unwrap();
    let k3 = built(&dir, "k3.json", &["graph", "complete", "3"]);
    let complete = file(&dir, "kn.json", r#"{"kind":"custom","name":"complete","params":{}}"#);
    let csv = dir.path().join("fit.csv");
    let o = polyseq(&["detect", "--spec", s(&complete), "--pattern", s(&k3), "--csv", s(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["fit"], "6*C(n,3)");
    let rows = fs::read_to_string(&csv).unwrap();
    let values: Vec<&str> = rows.lines().skip(1).take(5).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["0", "0", "0", "6", "24"]);

    let cycles = file(&dir, "cn.json", r#"{"kind":"custom","name":"cycle","params":{}}"#);
    let o = polyseq(&["detect", "--spec", s(&cycles), "--pattern", s(&k3)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"], "NotPolynomial");

    let formula = file(&dir, "phi.qf", "E(x,y) & E(y,z) & !(x = z)\n");
    let o = polyseq(&["detect", "--spec", s(&complete), "--formula", s(&formula)]);
    assert_eq!(json(&o)["fit"], "6*C(n,3)");
}

#[test]
fn spec_polynomials_use_the_binomial_basis() {
    let dir = TempDir::new().unwrap();
    let k1 = built(&dir, "k1.json", &["graph", "complete", "1"]);
    let spec = file(
        &dir,
        "sq.json",
        r#"{"kind":"basic","k":1,"l":0,"orders":["n^2"]}"#,
    );
    let o = polyseq(&["detect", "--spec", s(&spec), "--pattern", s(&k1)]);
    assert_eq!(json(&o)["fit"], "C(n,1) + 2*C(n,2)");
}

#[test]
fn interprets_scheme_files() {
    let dir = TempDir::new().unwrap();
    let k4 = built(&dir, "k4.json", &["graph", "complete", "4"]);
    let out = dir.path().join("line.json");
    let o = polyseq(&["interpret", "--scheme", &core_data("line.int"), "--in", s(&k4), "--out", s(&out), "--index", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["domain"], 6);
    let oct = built(&dir, "oct.json", &["gallery", "lineGraph", "4"]);
    let count = |p: &Path| {
        let o = polyseq(&["count", "--pattern", s(&k4), "--target", s(p)]);
        stdout(&o)
    };
    assert_eq!(count(&out), count(&oct));

    let o = polyseq(&["interpret", "--scheme", &core_data("bad_arity.int"), "--in", s(&k4)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("`E`"), "{}", stderr(&o));
}

#[test]
fn gallery_runs_and_checks() {
    let o = polyseq(&["gallery", "list"]);
    assert_eq!(json(&o)["entries"].as_array().unwrap().len(), 11);
    let o = polyseq(&["gallery", "run", "johnson", "--params", r#"{"k":2,"d":[1]}"#, "--n", "5"]);
    let g: Value = json(&o);
    assert_eq!(g["domain"], 10);
    let o = polyseq(&["gallery", "run", "crown", "--check", "--range", "0..5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
    let o = polyseq(&["gallery", "run", "starUnion", "--params", r#"{"literal":true}"#, "--check"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["firstMismatch"]["n"], 1);
    let o = polyseq(&["gallery", "run", "johnson", "--params", r#"{"k":2,"d":[5]}"#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decomposes_or_rejects() {
    let dir = TempDir::new().unwrap();
    let spec = file(
        &dir,
        "pe.json",
        r#"{"kind":"union","parts":[
            {"kind":"copies","m":"n+1","inner":{"kind":"constant","structure":{"signature":[{"name":"E","arity":2}],"domain":1,"relations":{"E":[]}}}},
            {"kind":"copies","m":"n^2","inner":{"kind":"constant","structure":{"signature":[{"name":"E","arity":2}],"domain":2,"relations":{"E":[[0,1],[1,0]]}}}}
        ]}"#,
    );
    let o = polyseq(&["decompose", "--spec", s(&spec), "--cap", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut mult: Vec<String> = json(&o)["parts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["multiplicity"].as_str().unwrap().to_string())
        .collect();
    mult.sort();
    assert_eq!(mult, ["1 + C(n,1)", "C(n,1) + 2*C(n,2)"]);
    let crown = file(&dir, "crown.json", r#"{"kind":"custom","name":"crown","params":{}}"#);
    let o = polyseq(&["decompose", "--spec", s(&crown), "--cap", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["rejected"]["kind"], "unboundedDegree");
}

#[test]
fn paley_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let k2 = built(&dir, "k2.json", &["graph", "complete", "2"]);
    let args = ["paley", "--pattern", s(&k2), "--primes", "5,13,17,29"];
    let a = polyseq(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, polyseq(&args).stdout);
    assert_eq!(json(&a)["homFit"]["coefficients"][2], "1/2");
    let o = polyseq(&["paley", "--pattern", s(&k2), "--primes", "5,7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(polyseq(&["count", "--mode", "weird"]).status.code(), Some(2));
    assert_eq!(polyseq(&["structure", "build", "graph", "wheel", "3"]).status.code(), Some(2));
    assert_eq!(polyseq(&["nonsense"]).status.code(), Some(2));
    assert_eq!(polyseq(&["--help"]).status.code(), Some(0));
}
