use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn divcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divcode"))
        .args(args)
        .env_remove("DIVCODE_TIME_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Writes a bundled fixture's topology and traffic into `dir`.
fn fixture(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    let topo = dir.join(format!("{name}.topo"));
    let traffic = dir.join(format!("{name}.csv"));
    let o = divcode(&["fixture", name]);
    assert!(o.status.success());
    fs::write(&topo, &o.stdout).unwrap();
    let o = divcode(&["fixture", name, "--traffic"]);
    assert!(o.status.success());
    fs::write(&traffic, &o.stdout).unwrap();
    (topo, traffic)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_one_trace_goes_from_17_to_15() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "example1");
    let out = dir.path().join("out");
    let o = divcode(&["design", "--topology", s(&topo), "--traffic", s(&traffic), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("17 -> 15"));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let objectives: Vec<&str> = trace.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(objectives, ["17", "15"]);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().last().unwrap().starts_with("ALL,"));
}

#[test]
fn unknown_coding_mode_is_a_usage_error() {
    let o = divcode(&["design", "--topology", "x", "--traffic", "y", "--coding", "rs"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn destination_without_demand_gives_an_empty_plan() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "example1");
    let o = divcode(&["--json", "design", "--topology", s(&topo), "--traffic", s(&traffic), "--dest", "S1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["destinations"].as_array().unwrap().len(), 0);
    assert_eq!(v[0]["total_cost"], 0.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no inbound demand"));
}

#[test]
fn corrupted_plan_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "example1");
    let out = dir.path().join("out");
    assert!(divcode(&["design", "--topology", s(&topo), "--traffic", s(&traffic), "--out", s(&out)]).status.success());
    let plan_path = out.join("plan.json");
    let ok = divcode(&["verify", "--topology", s(&topo), "--plan", s(&plan_path)]);
    assert_eq!(ok.status.code(), Some(0));

    // Reroute the first source's raw path over the span its parity path uses.
    let mut plan: Value = serde_json::from_str(&fs::read_to_string(&plan_path).unwrap()).unwrap();
    let paths = plan["destinations"][0]["columns"][0]["group"]["paths"].as_array_mut().unwrap();
    let raw = paths
        .iter_mut()
        .find(|p| p["links"][0] == "S1->B")
        .expect("raw path over B");
    raw["links"] = serde_json::json!(["S1->A", "A->D"]);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&plan).unwrap()).unwrap();
    let o = divcode(&["--json", "verify", "--topology", s(&topo), "--plan", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reasons = v["failures"][0]["reasons"].to_string();
    assert!(reasons.contains("A-D") || reasons.contains("D-A"), "{reasons}");
}

#[test]
fn traffic_generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, _) = fixture(dir.path(), "six-node");
    let run = || {
        let o = divcode(&["gen-traffic", "--topology", s(&topo), "--demands", "40", "--seed", "9"]);
        assert!(o.status.success());
        o.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 40);
}

#[test]
fn design_artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "six-node");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = divcode(&["design", "--topology", s(&topo), "--traffic", s(&traffic), "--out", s(&out)]);
        assert!(o.status.success());
        outputs.push(
            ["plan.json", "summary.csv", "trace.csv"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bound_stays_below_the_coherent_design() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "butterfly");
    let o = divcode(&["--json", "lowerbound", "--topology", s(&topo), "--traffic", s(&traffic), "--max-cut-size", "3"]);
    assert!(o.status.success());
    let bound = serde_json::from_str::<Value>(&stdout(&o)).unwrap()["total_bound"].as_f64().unwrap();
    let o = divcode(&["--json", "design", "--topology", s(&topo), "--traffic", s(&traffic), "--coding", "cdc"]);
    assert!(o.status.success());
    let cost = serde_json::from_str::<Value>(&stdout(&o)).unwrap()[0]["total_cost"].as_f64().unwrap();
    assert!(bound <= cost, "{bound} > {cost}");
}

#[test]
fn aps_on_the_diamond() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "diamond");
    let o = divcode(&["--json", "aps", "--topology", s(&topo), "--traffic", s(&traffic)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_cost"], 4.0);
}

#[test]
fn runtime_errors_are_json() {
    let o = divcode(&["aps", "--topology", "/nonexistent.topo", "--traffic", "/nonexistent.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert!(v["error"].as_str().unwrap().contains("nonexistent"));
}

#[test]
fn oracle_matches_example_one() {
    let dir = tempfile::tempdir().unwrap();
    let (topo, traffic) = fixture(dir.path(), "example1");
    let o = divcode(&["--json", "oracle", "--topology", s(&topo), "--traffic", s(&traffic)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_cost"], 15.0);
}
