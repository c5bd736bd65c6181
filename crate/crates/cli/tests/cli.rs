use std::path::Path;
use std::process::{Command, Output};

fn rf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rf"))
        .args(args)
        .output()
        .expect("run rf")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn gen_solve_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.txt");
    let factor = path(dir.path(), "factor.json");
    let out = rf(&[
        "gen", "--kind", "random", "--n", "12", "--t", "3", "--delta", "9", "--seed", "4", "-o", &inst,
    ]);
    assert!(out.status.success());
    let out = rf(&[
        "solve",
        "--instance",
        &inst,
        "--pattern",
        "clique:3",
        "--seed",
        "2",
        "--out",
        &factor,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "factor");
    assert_eq!(report["factor"]["copies"].as_array().unwrap().len(), 4);
    let out = rf(&["verify", "--instance", &inst, "--factor", &factor]);
    assert_eq!(out.status.code(), Some(0));

    // a tampered factor is rejected
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&factor).unwrap()).unwrap();
    doc["copies"][0]["colors"][0] = doc["copies"][1]["colors"][0].clone();
    std::fs::write(&factor, doc.to_string()).unwrap();
    let out = rf(&["verify", "--instance", &inst, "--factor", &factor]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extremal_instance_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "ext.txt");
    assert!(rf(&["gen", "--kind", "extremal", "--n", "9", "--t", "3", "-o", &inst])
        .status
        .success());
    let out = rf(&[
        "solve",
        "--instance",
        &inst,
        "--pattern",
        "clique:3",
        "--strategy",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "infeasible");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.txt");
    assert!(rf(&["gen", "--kind", "complete", "--n", "6", "--t", "3", "-o", &inst])
        .status
        .success());
    assert_eq!(
        rf(&["solve", "--instance", &inst, "--pattern", "blob:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        rf(&["solve", "--instance", &inst, "--pattern", "clique:4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rf(&["solve", "--instance", "/nonexistent", "--pattern", "clique:3"])
            .status
            .code(),
        Some(2)
    );
    let bad = rf(&[
        "solve",
        "--instance",
        &inst,
        "--pattern",
        "clique:3",
        "--set",
        "epsilon=0.01",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(rf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.txt");
    let cfg = path(dir.path(), "rf.conf");
    assert!(rf(&["gen", "--kind", "complete", "--n", "9", "--t", "3", "-o", &inst])
        .status
        .success());
    std::fs::write(&cfg, "seed = 5\ncover = lp\n").unwrap();
    let out = rf(&["solve", "--instance", &inst, "--pattern", "clique:3", "--config", &cfg]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 5);
    let out = rf(&[
        "solve",
        "--instance",
        &inst,
        "--pattern",
        "clique:3",
        "--config",
        &cfg,
        "--seed",
        "8",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 8);
    assert_eq!(report["status"], "factor");
}

#[test]
fn lp_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let h = path(dir.path(), "tri.txt");
    std::fs::write(&h, "hypergraph 3\n0 1\n1 2\n0 2\n").unwrap();
    let out = rf(&["lp", "--hypergraph", &h, "--mode", "cover"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("value,3/2\n"), "{text}");
    std::fs::write(&h, "hypergraph 3\n0 1\n").unwrap();
    let out = rf(&["lp", "--hypergraph", &h, "--mode", "pfm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("certificate,"));
}

#[test]
fn absorbers_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.txt");
    assert!(rf(&[
        "gen",
        "--kind",
        "complete",
        "--n",
        "6",
        "--pattern",
        "edge:2",
        "-o",
        &inst
    ])
    .status
    .success());
    let out = rf(&[
        "absorbers",
        "--instance",
        &inst,
        "--pattern",
        "edge:2",
        "--target",
        "0,1",
        "--colors",
        "0,1",
        "--limit",
        "3",
    ]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["B"], serde_json::json!([0, 1]));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    let json = path(dir.path(), "a.json");
    let args = [
        "sweep",
        "--pattern",
        "clique:3",
        "--n",
        "6,9",
        "--frac",
        "0.5,0.8",
        "--seeds",
        "3",
        "--strategy",
        "exact,absorption",
        "--no-timing",
    ];
    let mut first = args.to_vec();
    first.extend(["-o", &a, "--json", &json, "--jobs", "3"]);
    let mut second = args.to_vec();
    second.extend(["-o", &b, "--jobs", "1"]);
    assert!(rf(&first).status.success());
    assert!(rf(&second).status.success());
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8_lossy(&text).lines().count(), 1 + 2 * 2 * 3 * 2);
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 24);
}

#[test]
fn empty_sweep_has_header_only() {
    let out = rf(&["sweep", "--pattern", "clique:3", "--n", "6", "--seeds", "0"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "pattern,n,m,frac,seed,strategy,feasible,leftover,copies,ms,stage_stats\n"
    );
}
