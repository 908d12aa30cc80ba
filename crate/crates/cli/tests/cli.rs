use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glfamily")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_g_coordinates() {
    let o = run(&["eval-g", "--s", "0", "--coord", "1", "--point", "zeros-in-N00"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("1"));
    let o = run(&["eval-g", "--s", "0", "--coord", "0", "--point", "zeros-in-N00"]);
    assert_eq!(stdout(&o).lines().next(), Some("0"));
    // a point outside the domain
    let o = run(&["eval-g", "--s", "0", "--coord", "1", "--point", "ones"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["approx", "--L", "0"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--suite", "lemma9.9"]).status.code(), Some(2));
    assert_eq!(run(&["eval-g", "--coord", "1"]).status.code(), Some(2));
}

#[test]
fn approx_stages_as_json() {
    let o = run(&["approx", "--L", "1", "--depth", "2", "--emit", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["level"], 2);
    assert_eq!(v["X"].as_array().unwrap().len(), 4);
    let o = run(&["approx", "--depth", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["X"], serde_json::json!(["∅"]));
}

#[test]
fn approx_as_dot() {
    let o = run(&["approx", "--depth", "3", "--emit", "dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("digraph"));
}

#[test]
fn build_h_budget_and_depth() {
    let o = run(&["build-h", "--depth", "3", "--budget", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("budget"));
    for d in ["0", "8"] {
        let o = run(&["build-h", "--depth", d]);
        assert!(o.status.success(), "depth {d}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn build_h_writes_a_report() {
    let dir = std::env::temp_dir().join(format!("glfamily-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.json");
    let o = run(&["build-h", "--depth", "3", "--report", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_object());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn check_suites_report_seed_and_pass() {
    let o = run(&["--seed", "7", "check", "--suite", "lemma5.1", "--L", "2", "--kmax", "100000", "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["pass"], true);
    for args in [
        &["check", "--suite", "condition-d", "--L", "2"][..],
        &["check", "--suite", "lemma4.2", "--max-vertices", "5"],
        &["check", "--suite", "lemma4.3", "--max-vertices", "4", "--count", "50"],
        &["check", "--suite", "lemma4.7", "--count", "10"],
        &["check", "--suite", "lemma5.2", "--L", "1"],
        &["check", "--suite", "lemma5.3-4", "--depth", "8"],
        &["check", "--suite", "lemma5.7", "--depth", "8"],
        &["check", "--suite", "lemma5.8", "--depth", "8"],
        &["check", "--suite", "scheme-conditions", "--depth", "8"],
        &["check", "--suite", "oracles", "--count", "50"],
    ] {
        let o = run(args);
        assert!(o.status.success(), "{args:?}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("PASS"), "{args:?}: {}", stdout(&o));
    }
}
