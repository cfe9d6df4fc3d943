use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypervc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypervc"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPERVC_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let o = hypervc(args, dir);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid json")
}

#[test]
fn no_arguments_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypervc(&[], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_decimals_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hypervc(&["frobnicate"], dir.path()).status.code(), Some(2));
    let o = hypervc(&["setfam", "t", "--eps", "0.5", "--delta", "1/10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("decimal"));
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hypervc(&["gap", "--r", "0", "--k", "3"], dir.path()).status.code(), Some(1));
    assert_eq!(
        hypervc(&["solve", "--mode", "lp", "missing.json"], dir.path()).status.code(),
        Some(1)
    );
}

#[test]
fn chernoff_t_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypervc(&["setfam", "t", "--eps", "1/2", "--delta", "1/10"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "232");
    assert!(stderr(&o).starts_with("config: "));
    let v = json(&ok(&["setfam", "t", "--eps", "1/2", "--delta", "1/10", "--format", "json"], dir.path()));
    assert_eq!(v["t"], 232);
}

#[test]
fn gap_then_solve_all() {
    let dir = tempfile::tempdir().unwrap();
    let rep = json(&ok(&["gap", "--r", "2", "--k", "3", "--out", "g.json"], dir.path()));
    assert_eq!(rep["lp"], "3/1");
    assert!(dir.path().join("g.json").exists());
    let table = ok(&["solve", "--mode", "all", "g.json"], dir.path());
    let row = table.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols[0], "g.json");
    assert_eq!(cols[1], "3/1");
    assert!(table.contains("rounded") && table.contains("greedy"));

    let v = json(&ok(&["solve", "--mode", "exact", "--format", "json", "g.json"], dir.path()));
    assert_eq!(v["lpValue"], "3/1");
    assert_eq!(v["vcOptimal"], true);
}

#[test]
fn gap_without_out_streams_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    let doc = ok(&["gap", "--r", "1", "--k", "3", "--no-verify"], dir.path());
    let v = json(&doc);
    assert_eq!(v["k"], 3);
    // stdin round trip
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypervc"))
        .args(["solve", "--mode", "lp", "--format", "json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(doc.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let rep = json(&stdout(&o));
    assert_eq!(rep["instance"], "stdin");
    assert_eq!(rep["lpValue"], "3/2");
}

#[test]
fn budget_env_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hypervc"))
        .args(["gap", "--r", "2", "--k", "3"])
        .env("HYPERVC_BUDGET", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget is 5"));
    // an explicit flag wins over the environment
    let o = Command::new(env!("CARGO_BIN_EXE_hypervc"))
        .args(["gap", "--r", "2", "--k", "3", "--no-verify", "--edge-budget", "100"])
        .env("HYPERVC_BUDGET", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn report_table_respects_weak_duality() {
    let dir = tempfile::tempdir().unwrap();
    let table = ok(&["report", "--pairs", "1:3,2:3"], dir.path());
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let v = json(&ok(&["report", "--pairs", "2:3", "--format", "json"], dir.path()));
    assert_eq!(v[0]["lp"], "3/1");
    assert_eq!(v[0]["vcExact"], "4/1");
}

#[test]
fn setfam_tools() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("f.json"), r#"{"n":3,"sets":[[2,3],[3]]}"#).unwrap();
    std::fs::write(p.join("g.json"), r#"{"n":3,"sets":[[1,2,3]]}"#).unwrap();
    let m = json(&ok(&["setfam", "measure", "--family", "f.json", "--p", "1/2"], p));
    assert_eq!(m["measure"], "1/4");
    let s = json(&ok(&["setfam", "shift", "--family", "f.json"], p));
    assert_eq!(s["sets"], serde_json::json!([[1], [1, 2]]));
    let one = json(&ok(&["setfam", "shift", "--family", "f.json", "--i", "1", "--j", "3"], p));
    assert_eq!(one["sets"], serde_json::json!([[1], [1, 2]]));
    let c = json(&ok(&["setfam", "cross", "--t", "1", "f.json", "g.json"], p));
    assert_eq!(c["holds"], true);
    let c = json(&ok(&["setfam", "cross", "--t", "2", "f.json", "g.json"], p));
    assert_eq!(c["holds"], false);
    assert_eq!(c["witness"], serde_json::json!([[3], [1, 2, 3]]));
    // {1} and {1}: both violate density for q = 1/2, t = 2
    std::fs::write(p.join("h.json"), r#"{"n":3,"sets":[[1]]}"#).unwrap();
    let w = json(&ok(&["setfam", "witness", "--t", "2", "--q", "1/2,1/2", "h.json", "h.json"], p));
    assert_eq!(w["outcome"], "tuple");
    assert!(w["intersection"].as_array().unwrap().len() < 2);
    let d = json(&ok(&["setfam", "witness", "--prefix", "--t", "1", "--q", "1/2", "h.json"], p));
    assert_eq!(d["families"][0]["allDense"], true);
    let o = hypervc(&["setfam", "witness", "--t", "2", "--q", "1/2", "h.json", "h.json"], p);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pcp_reduce_decode_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gen = [
        "pcp", "gen", "--layers", "2", "--vars", "2", "--ranges", "2,3", "--density", "1",
        "--seed", "5", "--planted", "--out", "c.json", "--labeling-out", "a.json",
    ];
    ok(&gen, p);
    let first = std::fs::read(p.join("c.json")).unwrap();
    ok(&gen, p);
    assert_eq!(first, std::fs::read(p.join("c.json")).unwrap());

    let best = json(&ok(&["pcp", "best", "--csp", "c.json"], p));
    assert_eq!(best["fraction"], "1/1");
    let dens = json(&ok(
        &["pcp", "density", "--csp", "c.json", "--delta", "1", "--choose", "0=v1_1,v1_2", "--choose", "1=v2_1,v2_2"],
        p,
    ));
    assert_eq!(dens["outcome"], "pair");

    ok(
        &[
            "reduce", "--csp", "c.json", "--k", "3", "--r", "1", "--eps", "1/10", "--out", "inst.json",
            "--labeling", "a.json", "--iset-out", "i.json", "--hypergraph-out", "h.json",
        ],
        p,
    );
    let inst = json(&std::fs::read_to_string(p.join("inst.json")).unwrap());
    assert_eq!(inst["completeness"]["nonDummyWeight"], "7/30");
    assert_eq!(inst["completeness"]["expected"], "7/30");
    let h = json(&std::fs::read_to_string(p.join("h.json")).unwrap());
    assert_eq!(h["k"], 4);

    let args = ["decode", "--instance", "inst.json", "--iset", "i.json", "--seed", "11"];
    let runs: Vec<String> = (0..3).map(|_| ok(&args, p)).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let d = json(&runs[0]);
    assert_eq!(d["pairs"][0]["satisfied"], "1/1");

    let single = json(&ok(
        &["decode", "--instance", "inst.json", "--iset", "i.json", "--seed", "11", "--layers", "0,1"],
        p,
    ));
    assert_eq!(single["pairs"], d["pairs"]);

    // the full vertex set is not independent
    let all: Vec<String> = h["parts"].as_array().unwrap().iter().flat_map(|p| p.as_array().unwrap().clone()).map(|v| v.as_str().unwrap().to_string()).collect();
    std::fs::write(p.join("all.json"), serde_json::to_string(&all).unwrap()).unwrap();
    let o = hypervc(&["decode", "--instance", "inst.json", "--iset", "all.json", "--seed", "1"], p);
    assert_eq!(o.status.code(), Some(1));
}
