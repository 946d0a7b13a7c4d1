use qcurrent::suite::{run_suite, Expectation, Record, Status, SuiteConfig, SuiteName, SuiteReport};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qcv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcv")).args(args).env_remove("QCV_THREADS").output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("qgcli");
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const RATIONAL: [&str; 8] = ["suite", "rational", "--N", "3", "--K", "6", "--window", "12"];

#[test]
fn rational_report_matches_golden() {
    let o = qcv(&RATIONAL);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/rational_N3_K6_W12.json");
    if std::env::var_os("QCV_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    assert_eq!(text, std::fs::read_to_string(&path).unwrap());
    let rep = SuiteReport::from_json(&text).unwrap();
    assert_eq!(rep.summary.fail, 0);
    assert!(rep.summary.pass >= 10);
    assert!(rep.records.iter().any(|r| r.operation == "u_identity"));
}

#[test]
fn reports_are_deterministic() {
    let a = qcv(&RATIONAL);
    let b = Command::new(env!("CARGO_BIN_EXE_qcv")).args(RATIONAL).env("QCV_THREADS", "1").output().unwrap();
    assert_eq!(code(&b), 0);
    assert_eq!(a.stdout, b.stdout);
    let z1 = qcv(&["suite", "zn", "--N", "2", "--N", "3", "--K", "3", "--window", "6"]);
    let z2 = qcv(&["suite", "zn", "--N", "2", "--N", "3", "--K", "3", "--window", "6"]);
    assert_eq!(code(&z1), 0, "{}", String::from_utf8_lossy(&z1.stderr));
    assert_eq!(z1.stdout, z2.stdout);
}

#[test]
fn json_and_text_round_trip() {
    let json = String::from_utf8(qcv(&["suite", "theta"]).stdout).unwrap();
    let rep = SuiteReport::from_json(&json).unwrap();
    assert_eq!(rep.to_json(), json);
    assert_eq!(rep.summary.fail, 0);
    let o = qcv(&["suite", "theta", "--format", "text"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, rep.to_text());
    let back = SuiteReport::from_text(&text).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn text_round_trip_keeps_errors_and_timings() {
    let mut cfg = SuiteConfig::new(SuiteName::Zn);
    cfg.n = vec![3];
    let mut err = Record::engine_error("zn_vertex", "x", "N=3", &qcurrent::QcError::Domain("two words".into()));
    err.wall_ms = Some(1.5);
    let recs = vec![
        err,
        Record::new("zn_vertex", "y", "", 0.25, Expectation::Below(1e-3)),
        Record::new("zn_vertex", "z", "N=3", 7.0, Expectation::ExactNonzero),
        Record::exact("zn_vertex", "w", "N=3", 0).inconclusive(),
    ];
    let rep = SuiteReport::from_records(cfg, recs);
    assert_eq!(rep.summary.engine_errors, 1);
    assert_eq!(rep.summary.inconclusive, 1);
    assert_eq!(rep.exit_code(), 3);
    assert_eq!(SuiteReport::from_text(&rep.to_text()).unwrap(), rep);
    assert_eq!(SuiteReport::from_json(&rep.to_json()).unwrap(), rep);
}

#[test]
fn empty_suite_passes() {
    let rep = SuiteReport::from_records(SuiteConfig::new(SuiteName::All), vec![]);
    assert_eq!(rep.summary.total, 0);
    assert_eq!(rep.exit_code(), 0);
    assert_eq!(SuiteReport::from_text(&rep.to_text()).unwrap(), rep);
}

#[test]
fn inconclusive_does_not_fail() {
    let mut cfg = SuiteConfig::new(SuiteName::Rational);
    cfg.n = vec![2];
    cfg.k = Some(3);
    cfg.window = Some(8);
    let rep = run_suite(&cfg, false).unwrap();
    assert!(rep.summary.inconclusive > 0);
    assert_eq!(rep.summary.fail, 0);
    assert_eq!(rep.exit_code(), 0);
    assert!(rep.records.iter().filter(|r| r.status == Status::Inconclusive).all(|r| r.error.is_none()));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["suite", "nope"],
        vec!["suite", "rational", "--K", "1"],
        vec!["suite", "rational", "--window", "1"],
        vec!["suite", "rational", "--N", "0"],
        vec!["suite", "theta", "--tol", "pole_limit"],
        vec!["suite", "theta", "--tol", "pole_limit=abc"],
        vec!["suite", "theta", "--tol", "pole_limit=-1"],
        vec!["suite", "rational", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&qcv(&args)), 2, "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_qcv")).args(["suite", "theta"]).env("QCV_THREADS", "zero").output().unwrap();
    assert_eq!(code(&o), 2);
    let cfg = tmp("bad.toml");
    std::fs::write(&cfg, "suite = \"theta\"\nbogus = 1\n").unwrap();
    assert_eq!(code(&qcv(&["suite", "theta", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn tight_tolerance_fails_with_exit_1() {
    let o = qcv(&["suite", "theta", "--tol", "pole_limit=1e-300"]);
    assert_eq!(code(&o), 1);
    let rep = SuiteReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rep.summary.fail, 2);
    assert!(rep.records.iter().filter(|r| r.status == Status::Fail).all(|r| r.operation == "pole_limit"));
}

#[test]
fn engine_error_exits_3() {
    let fx = tmp("not_pd.fx");
    std::fs::write(&fx, "genus 1\nomega 0 -1\nalpha 0.5\nbeta 0.5\nh 1 0\n").unwrap();
    let o = qcv(&["suite", "theta", "--fixture", fx.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let rep = SuiteReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rep.summary.engine_errors, 1);
    assert!(rep.records[0].error.as_deref().unwrap().contains("domain"));
}

#[test]
fn unwritable_output_exits_4() {
    let out = tmp("missing_dir/report.json");
    let o = qcv(&["suite", "theta", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn out_file_and_config() {
    let out = tmp("zn.json");
    let cfg = tmp("zn.toml");
    std::fs::write(&cfg, format!("suite = \"zn\"\nn = [3]\nk = 3\nwindow = 6\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    let o = qcv(&["suite", "zn", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let rep = SuiteReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep.config.n, vec![3]);
    assert_eq!(rep.config.k, Some(3));
    assert!(rep.records.iter().all(|r| r.module == "zn_vertex"));
    // flags override the file
    let o = qcv(&["suite", "zn", "--config", cfg.to_str().unwrap(), "--window", "7", "--out", tmp("zn7.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rep = SuiteReport::from_json(&std::fs::read_to_string(tmp("zn7.json")).unwrap()).unwrap();
    assert_eq!(rep.config.window, Some(7));
}

#[test]
fn config_parsing() {
    let c = SuiteConfig::from_toml("suite = \"level0\"\nn = [3, 5]\nm = 12\n[tolerances]\npole_limit = 1e-4\n").unwrap();
    assert_eq!(c.suite, SuiteName::Level0);
    assert_eq!(c.n, vec![3, 5]);
    assert_eq!(c.m, Some(12));
    assert_eq!(c.tolerances["pole_limit"], 1e-4);
    assert!(SuiteConfig::from_toml("suite = \"bogus\"").is_err());
    assert!(SuiteConfig::from_toml("n = [3]").is_err());
    let mut bad = SuiteConfig::new(SuiteName::Zn);
    bad.m = Some(0);
    assert!(bad.validate().is_err());
}
