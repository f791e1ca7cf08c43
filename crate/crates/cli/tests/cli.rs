use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"dim":2,"edges":[["f","k"],["h","g"]],"vertices":["A","B","C","D"]}"#;
const EPS_F: &str = r#"{"dim":2,"edges":[["1A","1B"],["f","f"]],"vertices":["A","A","B","B"]}"#;
const OPEN_SQUARE: &str = r#"{"shell":[
    {"base":{"dim":1,"edges":[["h"]],"vertices":["A","C"]}},
    {"base":{"dim":1,"edges":[["g"]],"vertices":["B","D"]}},
    {"base":{"dim":1,"edges":[["f"]],"vertices":["A","B"]}},
    {"base":{"dim":1,"edges":[["k"]],"vertices":["C","D"]}}]}"#;

fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubical-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}\n{}", stdout(out)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn axioms_pass_on_the_poset_nerve() {
    let out = run(&["axioms", "--dim", "3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(checks.iter().all(|c| c.get("wall_ms").is_none()));
}

#[test]
fn broken_model_fails_with_recheckable_counterexample() {
    let dir = TempDir::new().unwrap();
    let out = run(&["--model", "broken", "axioms", "--dim", "3", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let failing: Vec<&Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| c["counterexample"].is_object()));
    let path = write(dir.path(), "report.json", &stdout(&out));
    let again = run(&["--model", "broken", "axioms", "--recheck", &path]);
    assert_eq!(code(&again), 1, "{}", stdout(&again));
    let healthy = run(&["--model", "nerve", "axioms", "--recheck", &path]);
    assert_eq!(code(&healthy), 0, "{}", stdout(&healthy));
}

#[test]
fn fixed_seed_gives_identical_reports() {
    let args = ["--cat", "free-square", "--seed", "7", "--samples", "50", "axioms", "--format", "json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["--cat", "free-square", "--seed", "8", "--samples", "50", "axioms", "--format", "json"]);
    assert_eq!(code(&other), 0);
}

#[test]
fn uniqueness_counts_are_logged_on_the_tower() {
    let out = run(&["--model", "tower", "--cat", "free-square", "--dim", "3", "theorems", "--name", "thm-1.4"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("valid pairs"), "{text}");
    assert!(text.contains("PASS thm-1.4 unique solution of ∂x = s, Ψx = a at dim 3"), "{text}");
}

#[test]
fn shell_composites_and_thin_composites() {
    let out = run(&["--cat", "free-square", "--dim", "3", "theorems", "--name", "cor-2.7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("composites of commutative 2-shells are commutative"));

    let out = run(&[
        "--model", "tower", "--cat", "free-square", "--dim", "3", "--format", "json", "theorems", "--name", "prop-2.2",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = json(&out);
    let random = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["mode"] == "sampled")
        .expect("random composite check");
    assert_eq!(random["instances"], 1000);
}

#[test]
fn tap_output() {
    let out = run(&["--cat", "terminal", "--dim", "2", "--format", "tap", "theorems"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("TAP version 13\n1.."));
    assert!(text.lines().skip(2).all(|l| l.starts_with("ok ") || l.starts_with("  ")), "{text}");
}

#[test]
fn fold_documents() {
    let dir = TempDir::new().unwrap();
    let square = write(dir.path(), "square.json", SQUARE);
    let out = run(&["fold", "--format", "json", &square]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["thin"], true);
    assert_eq!(doc["n"]["label"], "d");
    assert_eq!(doc["p"]["label"], "d");

    let eps = write(dir.path(), "eps.json", &format!(r#"{{"cube": {EPS_F}}}"#));
    let doc = json(&run(&["fold", "--format", "json", &eps]));
    assert_eq!(doc["thin"], true);
    assert_eq!(doc["n"]["label"], "f");
    assert_eq!(doc["p"]["label"], "f");

    let open = write(dir.path(), "open.json", OPEN_SQUARE);
    let out = run(&["--model", "tower", "--cat", "free-square", "--dim", "3", "fold", "--format", "json", &open]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["thin"], false);
    assert_eq!(doc["n_equals_p"], false);
    assert_ne!(doc["n"]["label"], doc["p"]["label"]);
}

#[test]
fn decompose_documents() {
    let dir = TempDir::new().unwrap();
    let square = write(dir.path(), "square.json", SQUARE);
    let out = run(&["decompose", "--format", "json", &square]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["base_free"], true);
    assert_eq!(doc["expression"]["kind"], "compose");

    let out = run(&["decompose", "--render", &square]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("ψ₁x"));

    let open = write(dir.path(), "open.json", OPEN_SQUARE);
    let out = run(&["--model", "tower", "--cat", "free-square", "--dim", "3", "decompose", &open]);
    assert_eq!(code(&out), 1);
}

#[test]
fn render_diagrams() {
    let dir = TempDir::new().unwrap();
    let square = write(dir.path(), "square.json", SQUARE);
    for diagram in ["psi", "array", "unfold", "refinement"] {
        let out = run(&["render", "--diagram", diagram, &square]);
        assert_eq!(code(&out), 0, "{diagram}");
        assert!(stdout(&out).contains("h: direction 2, v: direction 1"));
    }
    let out = run(&["render", "--dir", "2", &square]);
    assert_eq!(code(&out), 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["axioms", "--dim", "9"])), 2);
    assert_eq!(code(&run(&["--cat", "no-such-category", "axioms"])), 2);
    assert_eq!(code(&run(&["theorems", "--name", "thm-9.9"])), 2);
    assert_eq!(code(&run(&["axioms", "--name", "NOT-A-LAW"])), 2);
    assert_eq!(code(&run(&["fold", "/nonexistent/cube.json"])), 2);
    let bad = write(dir.path(), "bad.json", r#"{"dim": 1, "vertices": ["A", "B"], "edges": [["g"]]}"#);
    assert_eq!(code(&run(&["fold", &bad])), 2);
    let cat = write(dir.path(), "cat.json", r#"{"objects": ["X"], "morphisms": [], "identities": {}, "compose": []}"#);
    assert_eq!(code(&run(&["--cat", &cat, "axioms"])), 2);
}

#[test]
fn category_documents_load_from_paths() {
    let dir = TempDir::new().unwrap();
    let cat = write(
        dir.path(),
        "arrow.json",
        r#"{"name": "arrow", "graph": {"vertices": ["X", "Y"], "edges": [{"name": "u", "src": "X", "tgt": "Y"}]}}"#,
    );
    let out = run(&["--cat", &cat, "--dim", "3", "axioms"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("axioms on nerve(arrow)"));
}
