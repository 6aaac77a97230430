use std::path::Path;
use std::process::{Command, Output};

fn qatpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qatpg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bench_info_reports_gate_counts() {
    let out = qatpg(&["bench-info", "--circuit", "qft5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["gates"], 55);
    assert_eq!(doc["non_clifford"], 30);
    let out = qatpg(&["bench-info", "--circuit", "bv10", "--format", "json"]);
    assert_eq!(json(&out)["gates"], 29);
}

#[test]
fn gen_then_apply_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("p.json");
    let p = pattern.to_str().unwrap();
    let out = qatpg(&["gen", "--circuit", "qft3", "--site", "12", "--out", p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&pattern).unwrap()).unwrap();
    assert!((doc["rho_norms"]["nu_star"].as_f64().unwrap() - 1.0).abs() < 0.01);
    assert!((doc["m_norms"]["nu"].as_f64().unwrap() - 1.848).abs() < 0.02);

    let out = qatpg(&["apply", "--circuit", "qft3", "--pattern", p, "--seed", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let est = json(&out)["estimate"].as_f64().unwrap();
    assert!((est - 0.6913).abs() < 0.3, "estimate {est}");
}

#[test]
fn circuit_file_and_replacement_fault() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.qc");
    std::fs::write(&circ, "qubits 2\nh 1\ncnot 1 2\nrz 2 0.785398\n").unwrap();
    let repl = dir.path().join("r.qc");
    std::fs::write(&repl, "qubits 2\nrz 2 0.5\n").unwrap();
    let fault = format!("replace:{}", repl.display());
    let out = qatpg(&["gen", "--circuit", circ.to_str().unwrap(), "--site", "2", "--fault", &fault, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["fault"]["ReplacedBy"].is_array());
}

#[test]
fn undetectable_fault_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.qc");
    std::fs::write(&circ, "qubits 2\nh 1\ncnot 1 2\n").unwrap();
    let repl = dir.path().join("same.qc");
    std::fs::write(&repl, "qubits 2\nh 1\n").unwrap();
    let fault = format!("replace:{}", repl.display());
    let out = qatpg(&["gen", "--circuit", circ.to_str().unwrap(), "--site", "0", "--fault", &fault]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(qatpg(&["gen", "--circuit", "nosuch", "--site", "0"]).status.code(), Some(1));
    assert_eq!(qatpg(&["gen", "--circuit", "qft3"]).status.code(), Some(1));
    assert_eq!(qatpg(&["gen", "--circuit", "qft3", "--site", "40"]).status.code(), Some(1));
    assert_eq!(qatpg(&["apply", "--circuit", "qft3", "--pattern", "missing.json"]).status.code(), Some(1));
    assert_eq!(qatpg(&["help"]).status.code(), Some(0));
}

#[test]
fn too_few_candidates_is_infeasible() {
    let out = qatpg(&["detect", "--circuit", "qft3", "--k", "50"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detect_and_experiment_on_bv() {
    let out = qatpg(&["detect", "--circuit", "bv6", "--k", "3", "--inject-site", "0", "--seed", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["candidates"].as_array().unwrap().len(), 3);
    assert!(doc["faulty"].is_boolean());

    let out = qatpg(&["experiment", "--circuit", "bv6", "--k", "3", "--trials", "6", "--seed", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["trials"], 6);
    let counts: u64 = ["tp", "tn", "fp", "fn_"].iter().map(|k| doc[k].as_u64().unwrap()).sum();
    assert_eq!(counts, 6);
}

#[test]
fn gen_all_lists_every_site() {
    let out = qatpg(&["gen-all", "--circuit", "bv4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let n = doc.as_array().unwrap().len();
    let info = json(&qatpg(&["bench-info", "--circuit", "bv4", "--format", "json"]));
    assert_eq!(n as u64, info["gates"].as_u64().unwrap());
    assert!(!Path::new("p.json").exists());
}
