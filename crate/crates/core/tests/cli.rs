use std::process::{Command, Output};

use qop::cli::{Report, SectorReport};
use qop::functional::IdentityStatus;

fn qop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qop"))
        .args(args)
        .env("QOP_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

#[test]
fn solve_both_methods_prints_the_same_polynomial_twice() {
    let out = qop(&[
        "solve", "--L", "3", "--N", "3", "--p", "10", "--method", "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let body = |l: &str| l.split_once("Q(z) = ").unwrap().1.to_string();
    assert_eq!(body(lines[0]), body(lines[1]));
    assert!(lines[0].contains("609/26*z^8"));
}

#[test]
fn verify_tq_and_functional() {
    let out = qop(&[
        "verify",
        "--L",
        "3",
        "--N",
        "1",
        "--checks",
        "tq,functional",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report.schema, 1);
    assert_eq!(report.sectors.len(), 4);
    let ps: Vec<u32> = report.sectors.iter().map(|s| s.params.p()).collect();
    assert_eq!(ps, vec![3, 4, 5, 6]);
    for s in &report.sectors {
        assert!(s
            .identities
            .iter()
            .all(|i| i.status == IdentityStatus::Zero));
        assert!(s
            .identities
            .iter()
            .any(|i| i.identity_name == "first_fundamental"));
    }
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.trim_end().ends_with("ok"));
}

#[test]
fn even_l_exits_two() {
    assert_eq!(
        qop(&["solve", "--L", "2", "--N", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn out_of_range_sector_exits_two() {
    assert_eq!(
        qop(&["solve", "--L", "3", "--N", "1", "--p", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn report_round_trips() {
    let out = qop(&[
        "verify",
        "--L",
        "1",
        "--N",
        "2",
        "--checks",
        "tq,bae,decompose,fusion",
        "--method",
        "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let again: Report = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
    let s: &SectorReport = &report.sectors[0];
    assert_eq!(s.solutions.len(), 2);
    assert!(s.bae.as_ref().unwrap().max_residual < 1e-9);
    assert!(s.decomposition.is_some());
}

#[test]
fn latex_output() {
    let out = qop(&[
        "solve", "--L", "3", "--N", "1", "--p", "4", "--output", "latex",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\\frac{11}{3}z^{2}"), "{text}");
}

#[test]
fn unknown_check_is_a_usage_error() {
    assert_eq!(
        qop(&["verify", "--L", "3", "--N", "1", "--checks", "nope"])
            .status
            .code(),
        Some(2)
    );
}
