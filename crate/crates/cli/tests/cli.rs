//! Drives the `purepoint` binary on bundled and hand-made inputs.

use purepoint_core::fixtures;
use purepoint_core::format::parse_model;
use purepoint_core::pipeline::{check, CheckOptions, Report};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.json"))
}

fn purepoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purepoint")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes_follow_verdicts() {
    let fib = purepoint(&["check", path_str(&fixture("fibonacci"))]);
    assert_eq!(code(&fib), 0);
    assert!(stdout(&fib).contains("pure_point"));
    assert_eq!(code(&purepoint(&["check", path_str(&fixture("domino"))])), 1);
}

#[test]
fn malformed_input_is_a_parse_error() {
    let mut doc: serde_json::Value = serde_json::from_str(fixtures::get("fibonacci").unwrap().text).unwrap();
    doc.as_object_mut().unwrap().remove("digits");
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, doc.to_string()).unwrap();
    let out = purepoint(&["check", path_str(&p)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[parse]"));
}

#[test]
fn suspend_then_check() {
    let dir = TempDir::new().unwrap();
    for (name, expect) in [("period_doubling", 0), ("bbk", 1), ("four_letter", 1)] {
        let out = purepoint(&["suspend", path_str(&fixture(name))]);
        assert_eq!(code(&out), 0, "{name}");
        let p = dir.path().join(format!("{name}.json"));
        std::fs::write(&p, stdout(&out)).unwrap();
        assert_eq!(code(&purepoint(&["check", path_str(&p)])), expect, "{name}");
    }
    assert_eq!(code(&purepoint(&["suspend", path_str(&fixture("fibonacci"))])), 2);
}

#[test]
fn dot_matches_report_counts() {
    let dir = TempDir::new().unwrap();
    for name in ["period_doubling", "dekking"] {
        let dot = dir.path().join(format!("{name}.dot"));
        assert_eq!(code(&purepoint(&["graph", path_str(&fixture(name)), "--dot", path_str(&dot)])), 0);
        let text = std::fs::read_to_string(&dot).unwrap();
        let report: Report =
            serde_json::from_str(&stdout(&purepoint(&["check", path_str(&fixture(name)), "--report", "json"]))).unwrap();
        let nodes: Vec<&str> = text.lines().filter(|l| l.starts_with("  n") && l.as_bytes()[3].is_ascii_digit() && !l.contains("->")).collect();
        assert_eq!(nodes.len(), report.counts.vertices, "{name}");
        let pairs: std::collections::BTreeSet<&str> =
            text.lines().filter(|l| l.contains("->")).map(|l| l.split(" [").next().unwrap()).collect();
        assert_eq!(pairs.len(), report.counts.edges, "{name}");
        for l in nodes {
            let label = l.split("label=\"").nth(1).unwrap();
            let mut parts = label.split('|');
            let (i, j) = (parts.next().unwrap(), parts.next().unwrap());
            let z_zero = label.split("z≈(").nth(1).unwrap().split(')').next().unwrap().split(", ").all(|t| t.parse::<f64>().unwrap() == 0.0);
            assert_eq!(l.contains("doublecircle"), i == j && z_zero, "{l}");
        }
    }
}

#[test]
fn render_draws_one_marker_per_point() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("pd.svg");
    for (depth, markers) in [(0, 1), (4, 16)] {
        let d = depth.to_string();
        let out = purepoint(&["render", path_str(&fixture("period_doubling")), "--svg", path_str(&svg), "--depth", &d]);
        assert_eq!(code(&out), 0);
        let text = std::fs::read_to_string(&svg).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("class=\"marker\"").count(), markers);
    }
}

#[test]
fn zero_translation_agrees_fully() {
    let out = purepoint(&["oracle", path_str(&fixture("period_doubling")), "--alpha", "0", "--n-max", "3"]);
    assert_eq!(code(&out), 0);
    let rows: Vec<f64> = stdout(&out)
        .lines()
        .filter_map(|l| {
            let mut w = l.split_whitespace();
            w.next()?.parse::<u32>().ok()?;
            w.next()?.parse().ok()
        })
        .collect();
    assert_eq!(rows, vec![1.0; 3]);
}

#[test]
fn seed_classes_agree_from_the_command_line() {
    let out = purepoint(&["oracle", path_str(&fixture("thue_morse")), "--n-max", "2", "--seeds"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(": equal"));
}

#[test]
fn json_reports_repeat_and_match_the_library() {
    let model = parse_model(fixtures::get("dekking").unwrap().text, None).unwrap();
    let lib = check(&model, &CheckOptions::default()).unwrap().report;
    let runs: Vec<Report> = (0..2)
        .map(|_| serde_json::from_str(&stdout(&purepoint(&["check", path_str(&fixture("dekking")), "--report", "json"]))).unwrap())
        .collect();
    assert_eq!(runs[0].to_json_stable(), runs[1].to_json_stable());
    assert_eq!(runs[0].to_json_stable(), lib.to_json_stable());
}

#[test]
fn caps_give_exit_three() {
    let out = purepoint(&["check", path_str(&fixture("chair3d")), "--max-vertices", "10"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("unreliable"));
}
