use std::fs;
use std::process::Command as Proc;

use blowup_lab::cli::{parse_config, run_pipeline, Command, DimRange, Overrides};
use blowup_lab::exponents::Variant;
use blowup_lab::Error;

fn with_file(body: &str) -> (tempfile::TempDir, Overrides) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, body).unwrap();
    (dir, Overrides { config: Some(path), ..Overrides::default() })
}

#[test]
fn empty_config_gives_defaults() {
    let (_d, flags) = with_file("{}");
    let cfg = parse_config(Command::Blowup, &flags).unwrap();
    assert_eq!((cfg.delta, cfg.n0, cfg.i_max, cfg.d), (1.0 / 64.0, 1024.0, 6, None));
    assert_eq!(cfg.variant, Variant::Printed);
}

#[test]
fn each_failure_has_its_own_diagnostic() {
    let (_d, flags) = with_file(r#"{"delta": 0}"#);
    assert!(matches!(parse_config(Command::Blowup, &flags), Err(Error::Config(m)) if m.contains("delta")));
    let (_d, flags) = with_file(r#"{"detla": 0.01}"#);
    assert!(matches!(parse_config(Command::Blowup, &flags), Err(Error::UnknownKey(_))));
    let (_d, flags) = with_file(r#"{"delta": "#);
    assert!(matches!(parse_config(Command::Blowup, &flags), Err(Error::Malformed(_))));
    let flags = Overrides { d: Some("10".into()), ..Overrides::default() };
    assert!(matches!(parse_config(Command::Blowup, &flags), Err(Error::Config(_))));
    let flags = Overrides { variant: Some("typo".into()), ..Overrides::default() };
    assert!(parse_config(Command::Regularity, &flags).is_err());
}

#[test]
fn flags_override_the_file() {
    let (_d, mut flags) = with_file(r#"{"delta": "1/128", "i_max": 4, "d": "9..14"}"#);
    flags.i_max = Some(5);
    let cfg = parse_config(Command::Numerology, &flags).unwrap();
    assert_eq!((cfg.delta, cfg.i_max, cfg.d), (1.0 / 128.0, 5, Some(DimRange { lo: 9, hi: 14 })));
}

#[test]
fn reports_are_byte_identical_and_echo_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let flags = Overrides { out: Some(dir.path().to_path_buf()), i_max: Some(6), n0: Some("1024".into()), ..Overrides::default() };
    let cfg = parse_config(Command::Regularity, &flags).unwrap();
    assert!(run_pipeline(&cfg).unwrap().pass);
    let first = fs::read(dir.path().join("report.json")).unwrap();
    run_pipeline(&cfg).unwrap();
    assert_eq!(first, fs::read(dir.path().join("report.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["config"]["i_max"], 6);
    assert_eq!(v["config"]["n0"], 1024.0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    for f in ["fig9d.csv", "fig10d.csv", "fig9d.svg", "fig10d.svg", "timings.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn numerology_subcommand_table() {
    let dir = tempfile::tempdir().unwrap();
    let st = Proc::new(env!("CARGO_BIN_EXE_verify"))
        .args(["numerology", "--d", "9..14", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let rows = v["certificates"]["numerology"]["rows"].as_array().unwrap();
    let flags: Vec<(i64, bool)> = rows.iter().map(|r| (r["d"].as_i64().unwrap(), r["feasible"].as_bool().unwrap())).collect();
    assert_eq!(flags, vec![(9, false), (10, false), (11, true), (12, true), (13, true), (14, true)]);
    assert_eq!(rows[2]["alpha"], "3/2");
}

#[test]
fn regularity_subcommand_d10_csv_has_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let st = Proc::new(env!("CARGO_BIN_EXE_verify"))
        .args(["regularity", "--d", "10", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let mut rdr = csv::Reader::from_path(dir.path().join("fig10d.csv")).unwrap();
    let bad: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[3] == "false")
        .map(|r| r[0].parse().unwrap())
        .collect();
    for s in [2.0, 2.5, 3.0] {
        assert!(bad.iter().any(|b: &f64| (b - s).abs() < 1e-9), "s = {s} should fail");
    }
}

#[test]
fn bad_arguments_exit_with_status_two() {
    let st = Proc::new(env!("CARGO_BIN_EXE_verify")).args(["blowup", "--delta", "0"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}
