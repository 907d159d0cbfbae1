use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_interdict"));
    for var in [
        "INTERDICT_SCENARIO_LIMIT",
        "INTERDICT_LP_SCENARIO_LIMIT",
        "INTERDICT_PATH_LIMIT",
        "INTERDICT_TOLERANCE",
    ] {
        cmd.env_remove(var);
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn generate(dir: &Path, family: &str, k: usize, gamma: usize) -> PathBuf {
    let path = dir.join(format!("{family}_k{k}_g{gamma}.txt"));
    let k = k.to_string();
    let g = gamma.to_string();
    let o = run(&["generate", "--family", family, "--k", &k, "--gamma", &g, "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

#[test]
fn generate_fig2a_writes_nine_arcs() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 6, 2);
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("a ")).count(), 9);
    assert!(text.starts_with("p interdict 3 9 2\n"));
}

#[test]
fn generate_to_stdout_reports_counts() {
    let o = run(&["generate", "--family", "fig2a", "--k", "6", "--gamma", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("p interdict 3 9 2\n"));
    assert_eq!(stderr(&o).trim(), "3 nodes, 9 arcs");
}

#[test]
fn generate_random_is_deterministic_per_seed() {
    let args = ["generate", "--family", "random", "--seed", "7", "--gamma", "2", "--nodes", "6", "--arcs", "10"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args;
    other[4] = "8";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn generate_rejects_small_k() {
    let o = run(&["generate", "--family", "fig1", "--k", "2", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("K ≥ Γ+1"));
}

#[test]
fn solve_ni_prints_value() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 6, 2);
    let o = run(&["solve", "--model", "ni", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "Z_NI = 4"), "{}", stdout(&o));
}

#[test]
fn solve_rni_path_prints_value_and_certificate() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig1", 12, 2);
    let o = run(&["solve", "--model", "rni-path", path.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "Z_RNI^Path = 8"), "{out}");
    assert!(out.contains("PASS"));
}

#[test]
fn solve_models_on_fig1() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig1", 12, 2);
    let p = path.to_str().unwrap();
    for (model, line) in [("rni", "Z_RNI = 10"), ("lo", "Z_LO = 6")] {
        let out = stdout(&run(&["solve", "--model", model, p]));
        assert!(out.lines().any(|l| l == line), "{out}");
    }
}

#[test]
fn gamma1_requires_unit_budget() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 6, 2);
    let o = run(&["solve", "--model", "gamma1", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gamma1 requires Γ=1"));
    assert!(o.stdout.is_empty());
}

#[test]
fn gamma1_solves_unit_budget() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 3, 1);
    let o = run(&["solve", "--model", "gamma1", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert_eq!(v["certificate"]["pass"], Value::Bool(true));
}

#[test]
fn report_fig1_has_tight_row() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig1", 12, 2);
    let o = run(&["report", path.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "Z_RNI^Path/Z_LO = 1.3333 ≤ 1.3333 PASS(tight)"), "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn report_fig2a_large_uses_raised_limit() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 100, 3);
    let o = bin()
        .args(["report", path.to_str().unwrap()])
        .env("INTERDICT_SCENARIO_LIMIT", "200000")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "Z_NI/Z_RNI = 3.8800 ≤ 4 PASS"), "{out}");
    assert!(out.contains("partial report"));
}

#[test]
fn report_degenerate_budget_is_not_applicable() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("all.txt");
    std::fs::write(&path, "p interdict 2 2 2\nn 1 s\nn 2 t\na 1 2 1\na 1 2 2\n").unwrap();
    let o = run(&["report", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratios: Vec<&Value> = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|b| b["name"].as_str().unwrap().contains('/') && !b["name"].as_str().unwrap().contains('⇒'))
        .collect();
    assert_eq!(ratios.len(), 6);
    assert!(ratios.iter().all(|b| b["verdict"] == "N-A"));
}

#[test]
fn json_solution_has_schema_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig1", 12, 2);
    let o = run(&["solve", "--model", "rni", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["instance", "model", "value", "strategy", "certificate", "bounds"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let inst = interdict_core::instances::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let lib = interdict_core::solvers::solve_rni(&inst, &Default::default()).unwrap();
    let json_value = v["value"].as_f64().unwrap();
    assert_eq!(format!("{json_value:.11e}"), format!("{:.11e}", lib.value));
    let total: f64 = v["strategy"].as_array().unwrap().iter().map(|s| s["prob"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    for entry in v["strategy"].as_array().unwrap() {
        assert_eq!(entry["arcs"].as_array().unwrap().len(), 2);
    }
    assert_eq!(v["certificate"]["pass"], Value::Bool(true));
}

#[test]
fn json_error_object_on_limit() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 100, 3);
    let o = run(&["solve", "--model", "rni", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["exit_code"], 2);
    assert_eq!(v.as_object().unwrap().len(), 1);
}

#[test]
fn resource_limit_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 6, 2);
    let o = run(&["solve", "--model", "ni", "--scenario-limit", "5", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = bin()
        .args(["solve", "--model", "rni-path", path.to_str().unwrap()])
        .env("INTERDICT_PATH_LIMIT", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_error_exits_one_with_line() {
    let o = {
        let mut child = bin()
            .args(["solve", "--model", "ni", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        child
            .stdin
            .take()
            .unwrap()
            .write_all(b"p interdict 3 1 1\nn 1 s\nn 3 t\na 3 1 2.0\n")
            .unwrap();
        child.wait_with_output().unwrap()
    };
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4: arc enters source"), "{}", stderr(&o));
}

#[test]
fn stdin_instance_is_accepted() {
    let mut child = bin()
        .args(["solve", "--model", "ni", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"p interdict 2 2 1\nn 1 s\nn 2 t\na 1 2 1\na 1 2 1\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "Z_NI = 1"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(run(&["solve", "--model", "bogus", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--tolerance", "2", "report", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--scenario-limit", "0", "report", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--model", "ni", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn strategy_table_hides_negligible_scenarios() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "fig2a", 6, 2);
    let out = stdout(&run(&["solve", "--model", "rni", path.to_str().unwrap()]));
    let section: Vec<&str> = out
        .lines()
        .skip_while(|l| *l != "interdiction strategy:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .collect();
    assert!(!section.is_empty());
    for line in section {
        let p: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(p >= 1e-9);
    }
}
