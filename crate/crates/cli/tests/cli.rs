use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/samples")
}

fn sample(name: &str) -> String {
    samples().join(name).display().to_string()
}

fn gmpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmpa")).args(args).env_remove("GMPA_BUDGET").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn every_sample_checks_clean() {
    for entry in std::fs::read_dir(samples()).unwrap() {
        let p = entry.unwrap().path();
        let o = gmpa(&["check", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", p.display(), stdout(&o));
    }
}

#[test]
fn corrupted_datum_fails_with_witness() {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(sample("datum_swap.json")).unwrap()).unwrap();
    let g = &mut doc["datum"]["gamma"]["1,2"]["g"];
    g[1] = serde_json::json!([[0, 1], [0, 1]]);
    g[2] = serde_json::json!([[1, 0], [1, 0]]);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let o = gmpa(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o).lines().find(|l| l.contains("\"fail\"")).map(str::to_string).expect("a failing record");
    let rec: Value = serde_json::from_str(&line).unwrap();
    assert_eq!(rec["check"], "datum.axioms");
    assert!(!rec["witness"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn shape_errors_are_failures() {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(sample("action_partial.json")).unwrap()).unwrap();
    doc["partial_action"]["maps"][1] = serde_json::json!([[[0, 0], [0, 0]], [[1, 0], [0, 1]]]);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let o = gmpa(&["check", "action", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn unreadable_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"rings\": ").unwrap();
    assert_eq!(gmpa(&["check", p.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(gmpa(&["check", "/nonexistent.json"]).status.code(), Some(3));
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_gmpa"))
        .args(["check", &sample("example_sec63.json")])
        .env("GMPA_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert_eq!(gmpa(&["--budget", "10", "check", &sample("datum_swap.json")]).status.code(), Some(3));
}

#[test]
fn focused_checks() {
    assert_eq!(gmpa(&["check", "genmatrix", &sample("genmatrix_upper.json")]).status.code(), Some(0));
    assert_eq!(gmpa(&["check", "datum", &sample("datum_swap.json")]).status.code(), Some(0));
    assert_eq!(gmpa(&["check", "morita", &sample("datum_swap.json"), "--i", "1", "--j", "2"]).status.code(), Some(0));
    assert_eq!(gmpa(&["check", "groupoid-action", &sample("groupoid_coarse.json")]).status.code(), Some(0));
    assert_eq!(gmpa(&["check", "datum", &sample("action_swap.json")]).status.code(), Some(1));
    assert_eq!(gmpa(&["check", "morita", &sample("datum_swap.json")]).status.code(), Some(1));
}

#[test]
fn built_gamma_rechecks_as_an_action() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gamma.json");
    for src in ["datum_swap.json", "example_sec62.json", "example_grouptype.json"] {
        let o = gmpa(&["build", "gamma", &sample(src), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{src}: {}", String::from_utf8_lossy(&o.stderr));
        let o = gmpa(&["check", "action", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{src}: {}", stdout(&o));
    }
}

#[test]
fn built_datum_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("datum.json");
    let o = gmpa(&["build", "datum", &sample("example_sec63.json"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = gmpa(&["check", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 fail"));
}

#[test]
fn skew_ring_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("skew.json");
    assert_eq!(gmpa(&["build", "skewring", &sample("action_partial.json"), "-o", out.to_str().unwrap()]).status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["rings"]["skew"]["carrier"], 8);
}

#[test]
fn galois_reports_a_non_galois_component() {
    let o = gmpa(&["galois", &sample("example_support.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["ambient"], "NotGalois");
    assert_eq!(v["components"][1], "NotGalois");
    assert!(v["component_systems"][0].is_array());
}

#[test]
fn galois_system_is_printed() {
    let o = gmpa(&["galois", &sample("datum_swap.json"), "--m-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m_max"], 4);
    assert!(v["ambient"]["Galois"].is_object());
    assert_eq!(v["ambient_system"].as_array().unwrap().len(), 2);
}

#[test]
fn chain_report() {
    for src in ["groupoid_coarse.json", "example_grouptype.json"] {
        let o = gmpa(&["chain", &sample(src)]);
        assert_eq!(o.status.code(), Some(0), "{src}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let orders = v["orders"].as_array().unwrap();
        assert!(orders.iter().all(|x| *x == orders[0]));
    }
    assert_eq!(gmpa(&["chain", &sample("datum_swap.json")]).status.code(), Some(1));
}

#[test]
fn suite_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for p in [&a, &b] {
        let o = gmpa(&["suite", "--builtin", "smoke", "--builtin", "sec63-z2-4-2", "--seed", "11", "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let lines: Vec<Value> = ta.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["config"]["seed"], 11);
    let keys: Vec<(String, String)> =
        lines[1..].iter().map(|r| (r["source"].as_str().unwrap().into(), r["check"].as_str().unwrap().into())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(lines[1..].iter().all(|r| r.get("ms").is_none()));
}

#[test]
fn suite_over_files_and_builtins() {
    let o = gmpa(&["suite", "--builtin", "sec62", &sample("datum_swap.json"), &sample("groupoid_coarse.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = gmpa(&["suite", "--builtin", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = gmpa(&["suite", "--list"]);
    assert!(stdout(&o).contains("sec63-z2-4-2"));
}
