use std::path::Path;
use std::process::{Command, Output};

const CSV_HEADER: &str = "name,status,direction,computed,bound,slack_used,inputs,flags,note";

fn riesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn passing_sweep_exits_zero_with_json_report() {
    let out = riesz(&["norms", "--p-grid", "1.5,1.8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["summary"]["pass"], 8);
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 8);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pass 8 fail 0"), "{stderr}");
}

#[test]
fn failing_check_exits_one() {
    // the diagonal sandwich has known violations at small alpha
    let out = riesz(&["sandwich"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert!(report["summary"]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn bad_configuration_exits_two() {
    for args in [
        &["norms", "--d", "0"][..],
        &["norms", "--rel-tol", "2"],
        &["norms", "--format", "xml"],
        &["witness", "--p-grid", "2.5"],
        &["norms", "--free-const", "nonsense=1"],
    ] {
        let out = riesz(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "frobnicate = 3\n").unwrap();
    let out = riesz(&["norms", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.conf");
    let out = riesz(&["norms", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let unwritable = dir.path().join("no_such_dir").join("report.json");
    let out = riesz(&["norms", "--p-grid", "1.5", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!unwritable.exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# norms at one point\nd = 3\nalpha = 1\np-grid = 1.5\nfree-const = c1d=2.5\n").unwrap();
    let out = riesz(&["norms", "--config", path.to_str().unwrap(), "--d", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["params"]["d"], 2);
    assert_eq!(report["config"]["p_grid"]["points"][0], 1.5);
    let first = &report["records"][0]["inputs"];
    assert_eq!(first["d"], "2");
    assert_eq!(first["free.c1d"], "2.5");
}

fn csv_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn csv_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norms.csv");
    let out = riesz(&["norms", "--p-grid", "1.5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows = csv_rows(&path);
    assert_eq!(rows[0], CSV_HEADER);
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r.contains(",pass,")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = riesz(&["truncated", "--format", "csv"]);
    let b = riesz(&["truncated", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn help_lists_every_subcommand() {
    let out = riesz(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "norms",
        "witness",
        "sharp",
        "sandwich",
        "truncated",
        "generalized",
        "maximal",
        "conjecture",
        "all-checks",
    ] {
        assert!(text.contains(sub), "missing {sub}");
    }
}
