use std::collections::BTreeMap;
use std::process::Command;

use bubblekit::cli::{emit_report, parse_args, read_json, run, write_csv, OutputFormat, RunConfig, Suite};
use bubblekit::verify::{ResidualRecord, VerificationReport};
use bubblekit::Point;

const HEADER: &str = "suite_id,equation_id,probe,lhs,rhs,abs_err,rel_err\n";

fn config(args: &[&str]) -> RunConfig {
    parse_args(args.iter().copied()).unwrap()
}

fn empty_report() -> VerificationReport {
    VerificationReport::new("pde2d", vec![], BTreeMap::new(), serde_json::Value::Null)
}

#[test]
fn parses_single_parameter_run() {
    let c = config(&["--suite", "pde2d", "--p", "1.5", "--mu", "1"]);
    assert_eq!(c.suite, Suite::Pde2d);
    assert_eq!(c.planar.len(), 2);
    assert!(c.planar.iter().all(|b| b.p == 1.5 && b.mu == 1.0));
    assert_eq!(c.seed, 42);
    assert_eq!(c.output_format, OutputFormat::Json);
    assert_eq!(c.quadrature, bubblekit::QuadratureConfig::default());
}

#[test]
fn default_grid_for_identities() {
    let c = config(&["--suite", "identities"]);
    assert_eq!(c.planar.len(), 18);
    assert_eq!(c.hartree.len(), 6);
}

#[test]
fn center_and_tolerance_flags() {
    let c = config(&["--suite", "pde3d", "--sigma", "1.3", "--center", "1,-2,0.5", "--tol", "1e-7"]);
    assert_eq!(c.hartree.len(), 2);
    assert_eq!(c.hartree[0].center, Point::xyz(1.0, -2.0, 0.5));
    assert_eq!(c.quadrature.rel_tol, 1e-7);
    let c = config(&["--suite", "ie2d", "--center", "1,-0.5", "--format", "csv", "--out", "x/report.json"]);
    assert!(c.planar.iter().all(|b| b.center == Point::xy(1.0, -0.5)));
    assert_eq!(c.output_path, std::path::PathBuf::from("x/report.csv"));
}

#[test]
fn malformed_input_is_rejected() {
    assert!(parse_args(["--p", "abc"]).is_err());
    assert!(parse_args(["--suite", "pde2d", "--p", "abc"]).is_err());
    assert!(parse_args(["--suite", "pde2d", "--bogus"]).is_err());
    assert!(parse_args(["--suite", "nope"]).is_err());
    assert!(parse_args(["--suite", "pde2d", "--p", "-1"]).is_err());
    assert!(parse_args(["--suite", "pde3d", "--center", "1,2"]).is_err());
    assert!(parse_args(["--suite", "pde2d", "--tol", "0"]).is_err());
    let usage = parse_args(["--suite", "pde2d", "--bogus"]).unwrap_err().render().to_string();
    assert!(usage.contains("Usage"));
}

#[test]
fn empty_report_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(&["--suite", "pde2d", "--format", "csv"]);
    c.output_path = dir.path().join("r.csv");
    let path = emit_report(&empty_report(), &c).unwrap();
    assert_eq!(std::fs::read_to_string(path).unwrap(), HEADER);

    c.output_format = OutputFormat::Json;
    c.output_path = dir.path().join("r.json");
    let path = emit_report(&empty_report(), &c).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["records"], serde_json::json!([]));
}

#[test]
fn one_record_gives_two_csv_lines() {
    let rec = ResidualRecord::new("fraclap_u=exp_pv", Point::xy(0.5, -1.0), 1.0, 0.1, 1e-3);
    let rep = VerificationReport::new("pde2d", vec![rec], BTreeMap::new(), serde_json::Value::Null);
    let mut buf = Vec::new();
    write_csv(&rep, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(
        text,
        format!(
            "{HEADER}pde2d,fraclap_u=exp_pv,5.0000000000000000e-1 -1.0000000000000000e0,\
             1.0000000000000000e0,1.0000000000000001e-1,9.0000000000000002e-1,9.0000000000000002e-1\n"
        )
    );
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(&["--suite", "kelvin", "--p", "3", "--mu", "2", "--sigma", "2"]);
    c.output_path = dir.path().join("k.json");
    let rep = run(&c).unwrap();
    assert!(rep.passed);
    let path = emit_report(&rep, &c).unwrap();
    assert_eq!(read_json(&path).unwrap(), rep);
}

#[test]
fn failed_records_survive_serialization() {
    let rec = ResidualRecord::failed("e", Point::xy(0.0, 0.0), 1.0, 1e-3, "no convergence".into());
    let rep = VerificationReport::new("s", vec![rec], BTreeMap::new(), serde_json::Value::Null);
    assert!(!rep.passed);
    let mut buf = Vec::new();
    bubblekit::cli::write_json(&rep, &mut buf).unwrap();
    let back: VerificationReport = serde_json::from_slice(&buf).unwrap();
    assert!(back.records[0].lhs.is_nan());
    assert_eq!(back.records[0].error.as_deref(), Some("no convergence"));
    assert!(!back.passed);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(&["--suite", "identities", "--p", "1.5", "--mu", "1", "--sigma", "2"]);
    c.output_path = dir.path().join("a.json");
    let first = emit_report(&run(&c).unwrap(), &c).unwrap();
    let a = std::fs::read(first).unwrap();
    let second = emit_report(&run(&c).unwrap(), &c).unwrap();
    assert_eq!(std::fs::read(second).unwrap(), a);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k");
    let status = Command::new(env!("CARGO_BIN_EXE_bubblekit"))
        .args(["--suite", "kelvin", "--mu", "1", "--p", "1.5", "--sigma", "2", "--format", "csv", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success());
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with(HEADER));

    let bad = Command::new(env!("CARGO_BIN_EXE_bubblekit")).args(["--p", "abc"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("invalid value 'abc'"));
    let unknown = Command::new(env!("CARGO_BIN_EXE_bubblekit")).args(["--suite", "ie2d", "--bogus"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));

    let unwritable = Command::new(env!("CARGO_BIN_EXE_bubblekit"))
        .args(["--suite", "kelvin", "--p", "1", "--mu", "1", "--sigma", "2", "--out"])
        .arg(dir.path().join("missing/dir/report"))
        .output()
        .unwrap();
    assert!(!unwritable.status.success());
}
