//! End-to-end tests of the `semiq` binary: scenario wiring, the exit-code
//! contract, report determinism, and the file-output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn semiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiq"))
        .args(args)
        .env_remove("SEMIQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn without_wall_time(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.contains("wall_time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("semiq-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn anticorrelation_passes_and_reports() {
    let out = semiq(&["anticorrelation", "--transmission", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("scenario: anticorrelation"));
    assert!(text.contains("check quantum_correlation"));
    assert!(text.contains("status: pass"));
}

#[test]
fn hom_report_is_deterministic() {
    let a = semiq(&["hom"]);
    let b = semiq(&["hom"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        without_wall_time(&stdout(&a)),
        without_wall_time(&stdout(&b)),
        "reports must be byte-identical apart from wall time"
    );
    assert!(stdout(&a).contains("semiquantum_correlation"));
}

#[test]
fn subpoisson_and_squeezing_pass() {
    for args in [
        vec!["subpoisson"],
        vec!["subpoisson", "--state", "coherent", "--beta", "1.0"],
        vec!["squeezing", "--r", "0.5"],
    ] {
        let out = semiq(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "args {args:?} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("status: pass"));
    }
}

#[test]
fn separability_suite_small_run() {
    let out = semiq(&["separability-suite", "--trials", "5", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("check all_trials_bona_fide"));
    assert!(text.contains("status: pass"));
}

#[test]
fn config_file_supplies_defaults_and_cli_wins() {
    let path = temp_path("config.conf");
    std::fs::write(&path, "transmission = 0.3\nphase = 0.0\n").unwrap();
    let from_config = semiq(&["anticorrelation", "--config", path.to_str().unwrap()]);
    assert_eq!(from_config.status.code(), Some(0));
    assert!(stdout(&from_config).contains("input transmission: 0.3"));

    let overridden = semiq(&[
        "anticorrelation",
        "--config",
        path.to_str().unwrap(),
        "--transmission",
        "0.7",
    ]);
    assert!(stdout(&overridden).contains("input transmission: 0.7"));
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_config_key_exits_one() {
    let path = temp_path("bad.conf");
    std::fs::write(&path, "bogus_key = 1\n").unwrap();
    let out = semiq(&["hom", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key"));
    std::fs::remove_file(path).ok();
}

#[test]
fn numerics_failure_exits_two() {
    // a photocount grid far too short to hold the density mass
    let out = semiq(&["anticorrelation", "--grid-max", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn bad_flag_exits_one() {
    let out = semiq(&["anticorrelation", "--transmission", "not-a-number"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_output_path_exits_one() {
    // a regular file in the parent position makes the path unwritable
    let blocker = temp_path("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("report.txt");
    let out = semiq(&["hom", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(blocker).ok();
}

#[test]
fn writes_report_and_field_artifact() {
    let dir = temp_path("outdir");
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("witness.txt");
    let out = semiq(&[
        "wigner-negativity",
        "--m",
        "1",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&report_path).unwrap();
    assert!(report.contains("scenario: wigner-negativity"));
    assert!(report.contains("status: pass"));

    let field_path = dir.join("witness-wigner.csv");
    let field = std::fs::read_to_string(&field_path).unwrap();
    let mut lines = field.lines();
    assert!(lines.next().unwrap().starts_with("# x_range,"));
    assert!(lines.next().unwrap().starts_with("# y_range,"));
    assert!(lines.next().unwrap().starts_with("# nx,241"));
    assert!(lines.next().unwrap().starts_with("# ny,241"));
    let first_row = lines.next().unwrap();
    assert_eq!(first_row.split(',').count(), 241);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn out_dir_env_var_prefixes_relative_paths() {
    let dir = temp_path("envdir");
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_semiq"))
        .args(["hom", "--out", "report.txt"])
        .env("SEMIQ_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("report.txt").exists());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn table_format_has_header_row() {
    let out = semiq(&["hom", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("section,name,expected,computed,tol,basis,status"));
    assert!(text.contains("check,quantum_correlation"));
}
