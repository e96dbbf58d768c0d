use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ci-toolkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value_after(text: &str, prefix: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("{prefix} in {text}"));
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn compute_entropy_of_maximally_mixed_qubit() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "half.json", r#"{"parties":[{"label":"A","dim":2}],"matrix":[[0.5,0],[0,0],[0,0],[0.5,0]]}"#);
    let o = run(&["compute", "entropy", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("S(A): 1.000000 bits (exact)"), "{}", stdout(&o));
    assert!(stdout(&o).contains("config: seed=7 restarts=32"));
}

#[test]
fn compute_regularized_ghz() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "ghz.json", r#"{"preset":{"name":"ghz"}}"#);
    let o = run(&["compute", "ci-pure-reg", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2.000000 bits (exact, regularized pure-state closed form)"));
    assert!(stdout(&o).contains("alice=A bob=B charlie=C"));
}

#[test]
fn compute_ci_bounds_family() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "f.json", r#"{"preset":{"name":"family15","params":[0.7071]}}"#);
    let o = run(&["compute", "ci-bounds", s(&f), "--restarts", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lower = value_after(&out, "CI lower: ");
    let upper = value_after(&out, "CI upper: ");
    assert!(lower <= upper);
    assert!(out.contains("(upper-est, total-mi)"));
    assert!(out.contains("(lower-est, optimized-one-way)") || out.contains("(lower-est, discord-term)"));
}

#[test]
fn every_numeric_line_is_tagged() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "f.json", r#"{"preset":{"name":"family15","params":[0.4]}}"#);
    for q in ["discord", "one-way-ci", "lqsm-bound", "ed-interval", "log-neg", "merge-check"] {
        let o = run(&["compute", q, s(&f), "--restarts", "2"]);
        assert_eq!(o.status.code(), Some(0), "{q}: {}", stderr(&o));
        for line in stdout(&o).lines().filter(|l| l.contains(" bits")) {
            assert!(
                ["(exact", "(lower-est", "(upper-est"].iter().any(|t| line.contains(t)),
                "{q}: {line}"
            );
        }
    }
}

#[test]
fn compute_csv_output_to_file_is_reproducible() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "f.json", r#"{"preset":{"name":"family15","params":[0.6]}}"#);
    let out1 = d.path().join("a.csv");
    let out2 = d.path().join("b.csv");
    for o in [&out1, &out2] {
        let r = run(&["compute", "one-way-ci", s(&f), "--restarts", "3", "--seed", "11", "--format", "csv", "--out", s(o)]);
        assert_eq!(r.status.code(), Some(0));
        assert!(r.stdout.is_empty());
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("label,value,lower,upper,direction,seed\n"));
    assert!(!text.contains('\r'));
    assert!(text.contains(",lower-est,11\n"));
}

#[test]
fn input_errors_exit_2_with_field() {
    let d = TempDir::new().unwrap();
    let bad = write(&d, "bad.json", r#"{"parties":[{"label":"A","dim":2}],"matrix":[[0.5,0]]}"#);
    let o = run(&["compute", "entropy", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("matrix"));

    let bad = write(&d, "bad2.json", r#"{"parties":[{"label":"A","dim":0}],"matrix":[]}"#);
    let o = run(&["compute", "entropy", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parties[0].dim"));

    let o = run(&["compute", "entropy", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compute", "nonsense", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    let ghz = write(&d, "ghz.json", r#"{"preset":{"name":"ghz"}}"#);
    let o = run(&["compute", "entropy", s(&ghz), "--subset", "Q"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compute", "discord", s(&ghz), "--restarts", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dimension_cap_exits_3() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "ghz.json", r#"{"preset":{"name":"ghz"}}"#);
    let o = bin()
        .args(["compute", "entropy", s(&f)])
        .env("CI_TOOLKIT_DIM_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = bin()
        .args(["compute", "entropy", s(&f)])
        .env("CI_TOOLKIT_DIM_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_fast_suites() {
    let o = run(&["verify", "continuity"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("continuity: 100/100 PASS"));
    let o = run(&["verify", "cmi-identity"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cmi-identity: 10/10 PASS"));
    assert!(stdout(&o).ends_with("overall: PASS\n"));
}

#[test]
fn verify_is_deterministic_and_rejects_unknown_suites() {
    let a = run(&["verify", "kw-cross", "--seed", "3", "--restarts", "6"]);
    let b = run(&["verify", "kw-cross", "--seed", "3", "--restarts", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let o = run(&["verify", "everything"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_family15() {
    let o = run(&["verify", "family15", "--restarts", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("gap: 1/1 PASS"));
    assert!(out.contains("two-round: 1/1 PASS"));
    assert!(out.contains("separation-sweep: 9/9 PASS"));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,value,lower,upper,direction,seed"));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn sweep_oneway_gap() {
    let args = ["sweep", "oneway-gap", "--start", "0.1", "--stop", "0.95", "--steps", "9", "--restarts", "6"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let rows = csv_rows(&stdout(&a));
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r[1].parse::<f64>().unwrap() > 0.0, "{r:?}");
        assert_eq!(r[4], "upper-est");
    }
    assert_eq!(a.stdout, run(&args).stdout);
}

#[test]
fn sweep_single_step_and_bounds() {
    let o = run(&["sweep", "entropy", "--start", "0.3", "--stop", "0.3", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][4], "exact");

    let o = run(&["sweep", "ci-bounds", "--start", "0.2", "--stop", "0.9", "--steps", "3", "--restarts", "4"]);
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&stdout(&o)) {
        assert!(r[2].parse::<f64>().unwrap() <= r[3].parse::<f64>().unwrap() + 1e-9);
    }
}

#[test]
fn sweep_rejects_bad_ranges() {
    for args in [
        vec!["sweep", "entropy", "--start", "0.5", "--stop", "0.2", "--steps", "3"],
        vec!["sweep", "entropy", "--start", "0.1", "--stop", "0.2", "--steps", "0"],
        vec!["sweep", "entropy", "--start", "0.0", "--stop", "0.5", "--steps", "2"],
        vec!["sweep", "entropy", "--preset", "ghz", "--start", "0.1", "--stop", "0.5", "--steps", "2"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}
