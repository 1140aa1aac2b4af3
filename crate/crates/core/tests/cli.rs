use std::process::{Command, Output};

fn fairlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn equal_exits_zero_on_equality() {
    let o = fairlab(&["equal", "term && fair", "fin(alpha)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equal"));
}

#[test]
fn refines_exits_one_with_lasso_witness() {
    let o = fairlab(&["refines", "fair", "chaos"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("]^w"), "{}", stdout(&o));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let o = fairlab(&["eval", "pi ; bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1:6"), "{err}");
}

#[test]
fn resource_cap_exits_two_naming_the_subterm() {
    let o = fairlab(&["eval", "--cap", "3", "fair ||f chaos"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource cap"));
}

#[test]
fn eval_lists_members_on_request() {
    let o = fairlab(&["eval", "--states", "1", "--bound", "1", "--traces", "nil"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("0: !term") && out.contains("0: !inc"), "{out}");
}

#[test]
fn eval_json_has_counts() {
    let o = fairlab(&["eval", "--format", "json", "--states", "1", "pi || pi"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["traces"]["incomplete"], 1);
    assert_eq!(v["lassos"], 0);
}

#[test]
fn terms_can_come_from_a_file() {
    let dir = std::env::temp_dir().join(format!("fairlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("terms.txt");
    std::fs::write(&path, "# two terms\nfair ; fair\n\nfair\n").unwrap();
    let o = fairlab(&["equal", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn single_law_report_passes() {
    let o = fairlab(&["laws", "--only", "fair-parallel-associative", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fair-parallel-associative"));
}

#[test]
fn unknown_law_is_a_usage_error() {
    assert_eq!(fairlab(&["laws", "--only", "no-such-law"]).status.code(), Some(2));
}

#[test]
fn law_json_is_deterministic_and_schema_shaped() {
    let args = ["laws", "--only", "seq-assoc", "--samples", "20", "--states", "1", "--format", "json", "--seed", "5"];
    let (a, b) = (fairlab(&args), fairlab(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let r = &v["laws"][0];
    assert_eq!(r["law"], "seq-assoc");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["instances"], 20);
    assert!(r["violations"].as_array().unwrap().is_empty());
    assert_eq!(r["window"]["N"], 5);
}

#[test]
fn mutant_reports_a_violation() {
    let o = fairlab(&["laws", "--only", "mutant-pi-par-pi", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "a refuted mutant is the expected outcome");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let m = &v["mutants"][0];
    assert_eq!(m["status"], "fail");
    assert_eq!(m["violations"][0]["witnessSide"], "rhs");
}

#[test]
fn examples_all_pass() {
    let o = fairlab(&["examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(" ok ").count(), 5);
}

#[test]
fn oracle_check_at_depth_one() {
    let o = fairlab(&["oracle-check", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": 0 disagreements"), "{}", stdout(&o));
}
