// The `im` binary end to end: outputs, exit codes and config echo.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn im(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_im")).args(args).output().unwrap()
}

fn im_out(args: &[&str], prefix: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_im")).args(args).arg("--out").arg(prefix).output().unwrap()
}

fn read(prefix: &Path, ext: &str) -> String {
    std::fs::read_to_string(prefix.with_extension(ext)).unwrap()
}

#[test]
fn cc_reports_normal_interval() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("nl");
    let args = ["cc", "--model", "normal-location", "--data", "1", "--randomset", "two-sided", "--window", "-4", "6", "--levels", "0.95"];
    let out = im_out(&args, &prefix);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_str(&read(&prefix, "json")).unwrap();
    assert_eq!(json["kind"], "exact");
    let set = json["levels"][0]["set"].as_str().unwrap();
    let ends: Vec<f64> = set.trim_matches(|c| "[]()".contains(c)).split(',').map(|s| s.parse().unwrap()).collect();
    let z = 1.959_963_984_540_054;
    assert!((ends[0] - (1.0 - z)).abs() < 1e-9 && (ends[1] - (1.0 + z)).abs() < 1e-9, "{set}");
    let csv = read(&prefix, "csv");
    assert!(csv.starts_with("theta,cc\n-4,"));
    // nine significant digits at most
    for line in csv.lines().skip(1) {
        for field in line.split(',') {
            let digits = field.split(['e', 'E']).next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
            assert!(digits.trim_start_matches('0').len() <= 9, "{field}");
        }
    }
}

#[test]
fn oracle_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("oracle");
    let out = im_out(&["oracle", "--model", "discrete-shift:4", "--data", "5"], &prefix);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_str(&read(&prefix, "json")).unwrap();
    assert_eq!(json["violations"], 0);
    assert_eq!(json["tables"].as_array().unwrap().len(), 4);
    assert!(read(&prefix, "csv").contains("two-sided,\"{3,4}\",1/2,1,1/2"));
}

#[test]
fn fieller_set_from_cli() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ratio");
    let out = im_out(&["cc", "--model", "two-normal", "--data", "2", "1", "--functional", "ratio", "--levels", "0.95"], &prefix);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_str(&read(&prefix, "json")).unwrap();
    let set = json["levels"][0]["set"].as_str().unwrap();
    assert!(set.starts_with("(-inf,-1.44630567") && set.contains("[0.0385780") && set.ends_with(",inf)"), "{set}");
    assert_eq!(json["provenance"], "fieller");
}

#[test]
fn fiducial_csv_header() {
    let out = im(&["fiducial", "--model", "normal-location", "--data", "0", "--n", "10", "--seed", "4", "--tie-rule", "rightmost"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[..4], ["# seed=4", "# epsilon=0", "# acceptance_rate=1", "# tie_rule=rightmost"]);
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 11);
}

#[test]
fn config_echo_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["fiducial", "--model", "exp-rate", "--data", "2", "--n", "500", "--seed", "9", "--epsilon", "0.01"],
        &["validate", "--model", "normal-location", "--seed", "3", "--n-rep", "500", "--n-mc", "2000", "--assertion", "(1,inf)"],
        &["belief", "--model", "normal-location", "--data", "0.5", "--assertion", "(0,inf)", "--method", "mc", "--n-mc", "5000", "--seed", "1"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let prefix = dir.path().join(format!("run{i}"));
        assert_eq!(im_out(args, &prefix).status.code(), Some(0), "{args:?}");
        let (csv, json) = (read(&prefix, "csv"), read(&prefix, "json"));
        let sidecar = prefix.with_extension("json");
        let again = Command::new(env!("CARGO_BIN_EXE_im"))
            .args([args[0], "--config"])
            .arg(&sidecar)
            .output()
            .unwrap();
        assert_eq!(again.status.code(), Some(0));
        assert_eq!(read(&prefix, "csv"), csv, "{args:?}");
        assert_eq!(read(&prefix, "json"), json, "{args:?}");
    }
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"model":"normal-location","data":[3.0],"levels":[0.5]}"#).unwrap();
    let prefix = dir.path().join("o");
    let out = Command::new(env!("CARGO_BIN_EXE_im"))
        .args(["cc", "--data", "0", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_str(&read(&prefix, "json")).unwrap();
    assert_eq!(json["config"]["data"][0], 3.0);
    assert_eq!(json["minimizer"], 3.0);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(im(&["cc"]).status.code(), Some(2));
    assert_eq!(im(&["fiducial", "--model", "normal-location", "--data", "0"]).status.code(), Some(2));
    assert_eq!(im(&["validate", "--model", "normal-location"]).status.code(), Some(2));
    assert_eq!(im(&["belief", "--model", "normal-location", "--data", "0", "--assertion", "(0,"]).status.code(), Some(2));
    assert_eq!(im(&["oracle", "--model", "normal-location", "--data", "0"]).status.code(), Some(2));
    assert_eq!(
        im(&["validate", "--model", "normal-location", "--seed", "1", "--assertion", "(-1,1)", "--n-rep", "10"]).status.code(),
        Some(2)
    );
    // verdict failure: γ(u) = u² through a table is not valid
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("square.csv");
    let knots: String = (0..=20).map(|j| format!("{},{}\n", j as f64 / 20.0, (j as f64 / 20.0).powi(2))).collect();
    std::fs::write(&table, format!("u,gamma\n{knots}")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_im"))
        .args(["validate", "--model", "normal-location", "--seed", "1", "--n-rep", "2000", "--n-mc", "20000", "--gamma-table"])
        .arg(&table)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // success
    assert_eq!(im(&["belief", "--model", "discrete-shift:4", "--data", "5", "--assertion", "{3,4,5}", "--method", "exact"]).status.code(), Some(0));
}
