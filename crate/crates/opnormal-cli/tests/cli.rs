//! End-to-end tests driving the compiled binary: report content, exit codes,
//! determinism, and the documented failure diagnostics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opnormal::report::{ClassifyReport, SearchOutcome, SearchReport, VerifyReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opnormal"))
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

const RUNNING_PAIR_METRIC: &str =
    r#"{"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[2,0]]}"#;
const RUNNING_PAIR_OPERATOR: &str =
    r#"{"rows": 2, "cols": 2, "data": [[2,0],[0,0],[1,0],[-2,0]]}"#;

#[test]
fn classify_running_pair_reports_expected_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let metric = write_file(dir.path(), "a.json", RUNNING_PAIR_METRIC);
    let operator = write_file(dir.path(), "t.json", RUNNING_PAIR_OPERATOR);
    let output = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .args(["--n", "2", "--m", "1"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    let report: ClassifyReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    let ClassifyReport::Dense(report) = report else {
        panic!("expected dense mode");
    };
    let classes = report.classes.expect("classification ran");
    assert!(classes.nm_normal.verdict.is_pass());
    assert!(classes.nm_normal.residual <= 1e-12);
    assert!(classes.basic.a_normal.verdict.is_fail());
    assert!(classes.basic.a_normal.residual >= 1e-3);
    assert!(classes.nm_quasinormal.verdict.is_pass());
    assert!(report.membership.in_b_a.is_pass());
}

#[test]
fn classify_identity_metric_hermitian_operator_passes_at_one_one() {
    let dir = tempfile::tempdir().unwrap();
    let metric = write_file(
        dir.path(),
        "a.json",
        r#"{"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[1,0]]}"#,
    );
    let operator = write_file(
        dir.path(),
        "t.json",
        r#"{"rows": 2, "cols": 2, "data": [[1,0],[2,0],[2,0],[-1,0]]}"#,
    );
    let output = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: ClassifyReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    let ClassifyReport::Dense(report) = report else {
        panic!("expected dense mode");
    };
    let classes = report.classes.unwrap();
    assert!(classes.basic.a_normal.verdict.is_pass());
    assert!(classes.basic.a_selfadjoint.verdict.is_pass());
    assert!(classes.nm_normal.verdict.is_pass());
    assert!(classes.nm_quasinormal.verdict.is_pass());
}

#[test]
fn classify_rejects_operator_outside_the_admissible_class() {
    let dir = tempfile::tempdir().unwrap();
    let metric = write_file(
        dir.path(),
        "a.json",
        r#"{"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[0,0]]}"#,
    );
    let operator = write_file(
        dir.path(),
        "t.json",
        r#"{"rows": 2, "cols": 2, "data": [[0,0],[1,0],[0,0],[0,0]]}"#,
    );
    let output = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("outside the adjoint-admissible class"));

    let forced = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .arg("--force")
        .output()
        .unwrap();
    assert_eq!(forced.status.code(), Some(0));
    let report: ClassifyReport = serde_json::from_str(&stdout_of(&forced)).unwrap();
    let ClassifyReport::Dense(report) = report else {
        panic!("expected dense mode");
    };
    assert!(report.membership.in_b_a.is_fail());
    assert!(report.classes.is_none());
    assert!(report.seminorm.is_none());
}

#[test]
fn classify_exact_decides_the_unit_shift() {
    let dir = tempfile::tempdir().unwrap();
    let metric = write_file(
        dir.path(),
        "a.json",
        r#"{"preperiod": [], "period": [[1,1]]}"#,
    );
    let operator = write_file(
        dir.path(),
        "w.json",
        r#"{"preperiod": [], "period": [[1,1]]}"#,
    );
    let output = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .args(["--n", "2", "--m", "1", "--exact"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    let report: ClassifyReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    let ClassifyReport::Exact(report) = report else {
        panic!("expected exact mode");
    };
    assert!(report.nm_quasinormal.holds);
    assert!(!report.nm_normal.holds);
    assert_eq!(report.nm_normal.witness, Some(1));
    assert_eq!(report.seminorm_squared, ["1".to_string(), "1".to_string()]);
}

#[test]
fn classify_exact_refuses_tolerance_flags() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write_file(
        dir.path(),
        "s.json",
        r#"{"preperiod": [], "period": [[1,1]]}"#,
    );
    let output = bin()
        .arg("classify")
        .args([seq.to_str().unwrap(), seq.to_str().unwrap()])
        .args(["--exact", "--margin", "0.5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn classify_failure_diagnostics_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let big = write_file(
        dir.path(),
        "a3.json",
        r#"{"rows": 3, "cols": 3, "data": [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}"#,
    );
    let operator = write_file(dir.path(), "t.json", RUNNING_PAIR_OPERATOR);
    let garbled = write_file(dir.path(), "bad.json", "{not json");

    let missing = bin()
        .arg("classify")
        .args([dir.path().join("nope.json").to_str().unwrap(), operator.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr_of(&missing).contains("cannot read"));

    let parse = bin()
        .arg("classify")
        .args([garbled.to_str().unwrap(), operator.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(parse.status.code(), Some(2));
    assert!(stderr_of(&parse).contains("metric"));

    let mismatch = bin()
        .arg("classify")
        .args([big.to_str().unwrap(), operator.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(stderr_of(&mismatch).contains("dimension mismatch"));
}

#[test]
fn verify_small_config_passes_and_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "config.json",
        r#"{"dims": [2], "n_max": 1, "m_max": 1, "trials": 2, "seed": 9}"#,
    );
    let run = || {
        bin()
            .arg("verify")
            .arg(config.to_str().unwrap())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0), "{}", stderr_of(&first));
    let report: VerifyReport = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(report.rows_with_failures, 0);
    assert_eq!(report.rows_without_satisfied_premises, 0);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("zero.json", r#"{"trials": 0}"#),
        ("rows.json", r#"{"rows": ["thm9_9_bogus"]}"#),
        ("junk.json", "{"),
        ("unknown.json", r#"{"trails": 3}"#),
    ] {
        let config = write_file(dir.path(), name, body);
        let output = bin()
            .arg("verify")
            .arg(config.to_str().unwrap())
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(2), "config {name} should be rejected");
    }
}

#[test]
fn search_shift_emits_the_unit_shift_witness() {
    let output = bin()
        .arg("search")
        .arg("qn_not_normal(2,1)")
        .args(["--domain", "shift", "--budget", "10"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let report: SearchReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report.outcome, SearchOutcome::Witness);
    assert_eq!(report.evaluated, 1);
    let Some(opnormal::report::SearchWitness::Shift { weights, nm_normal, nm_quasinormal, .. }) =
        report.witness
    else {
        panic!("expected a shift witness");
    };
    assert!(nm_quasinormal.holds);
    assert!(!nm_normal.holds);
    let weights = weights.to_weights().unwrap();
    assert!(weights.at(1).is_real());
}

#[test]
fn search_dense_witness_survives_independent_reverification() {
    let output = bin()
        .arg("search")
        .arg("not_normal(1,1)")
        .args(["--dim", "2", "--budget", "100", "--seed", "4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let report: SearchReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    let Some(opnormal::report::SearchWitness::Dense { metric, operator, .. }) = report.witness
    else {
        panic!("expected a dense witness");
    };
    let a = metric.to_matrix().unwrap();
    let t = operator.to_matrix().unwrap();
    let tol = opnormal::numerics::Tolerance::default();
    let ctx = opnormal::semihilbert::MetricContext::new(a, tol).unwrap();
    let op = opnormal::semihilbert::a_adjoint(&ctx, &t).unwrap();
    let idx = opnormal::classes::ClassIndex::new(1, 1).unwrap();
    let residual = opnormal::classes::nm_normal_residual(&op, idx).unwrap();
    assert!(residual >= tol.distinctness_margin);
}

#[test]
fn search_rejects_bad_invocations() {
    let unknown = bin().arg("search").arg("bogus(1,1)").output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let zero = bin()
        .arg("search")
        .arg("not_normal(1,1)")
        .args(["--budget", "0"])
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn search_dense_exhaustion_exits_three() {
    let output = bin()
        .arg("search")
        .arg("qn_not_normal(2,1)")
        .args(["--dim", "2", "--budget", "200", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{}", stderr_of(&output));
    let report: SearchReport = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report.outcome, SearchOutcome::Exhausted);
    assert!(report.witness.is_none());
    assert!(report.evaluated <= 200);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let metric = write_file(dir.path(), "a.json", RUNNING_PAIR_METRIC);
    let operator = write_file(dir.path(), "t.json", RUNNING_PAIR_OPERATOR);
    let out = dir.path().join("report.json");
    let output = bin()
        .arg("classify")
        .args([metric.to_str().unwrap(), operator.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    let report: ClassifyReport = serde_json::from_str(&written).unwrap();
    assert!(matches!(report, ClassifyReport::Dense(_)));
}
