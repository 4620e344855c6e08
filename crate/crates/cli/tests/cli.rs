use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cartan_core::exactmat::parse_rational;
use cartan_core::{Mat, Rational, Subspace};
use cartan_skel::report::Report;

const EXAMPLE_LINE: &str =
    "hol dim 1; Z dim 2; autos dim 5; orbit dim 1; representatives diag(e^{m1}, e^{m1}, 1)";

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/sample.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan-skel"))
        .arg("run")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_problem(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn example_so3_prints_headline() {
    let o = run(&["example-so3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().nth(1), Some(EXAMPLE_LINE));
}

#[test]
fn sample_file_runs_every_task() {
    let o = run(&[sample().to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reports: Vec<Report> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(reports.len(), 12);
    let by_name = |n: &str| reports.iter().find(|r| r.task == n).unwrap();
    assert_eq!(by_name("riemann-classify").results.notes[0], EXAMPLE_LINE);
    assert_eq!(by_name("kernel-noneff").results.dims["kernel"], 1);
    assert_eq!(by_name("effective-quotient").results.dims["k"], 3);
    assert_eq!(by_name("curvature").results.dims["curvature"], 1);
    assert_eq!(by_name("torsion").results.dims["torsion"], 0);
    assert_eq!(by_name("flat-derivation").results.dims["retained"], 1);
    assert_eq!(by_name("flat-non-derivation").results.dims["retained"], 0);
}

#[test]
fn validate_euclidean() {
    let o = run(&[sample().to_str().unwrap(), "--task", "validate"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "effective: yes, kernel dim 0"), "{out}");
    assert!(!out.contains("== iext =="));
}

#[test]
fn iext_of_euclid3_contains_homothety() {
    let o = run(&[sample().to_str().unwrap(), "--task", "iext", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<Report> = serde_json::from_str(&stdout(&o)).unwrap();
    let basis = &reports[0].results.bases["iext"];
    let vecs: Vec<Vec<Rational>> = basis
        .iter()
        .map(|v| v.iter().map(|x| parse_rational(x).unwrap()).collect())
        .collect();
    let span = Subspace::span(36, vecs).unwrap();
    let homothety = Mat::from_fn(6, 6, |i, j| Rational::from_integer(((i == j && i < 3) as i64).into()));
    assert!(span.contains(&homothety.vectorize()).unwrap());
    assert_eq!(span.dim(), 5);
}

#[test]
fn output_is_deterministic() {
    let path = sample();
    for flag in [None, Some("--json")] {
        let mut args = vec![path.to_str().unwrap()];
        args.extend(flag);
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn json_round_trips() {
    let o = run(&[sample().to_str().unwrap(), "--json", "--tolerance-report"]);
    let text = stdout(&o);
    let reports: Vec<Report> = serde_json::from_str(&text).unwrap();
    assert_eq!(cartan_skel::render_json(&reports), text);
    let classify = reports.iter().find(|r| r.task == "riemann-classify").unwrap();
    assert!(classify.results.notes.iter().any(|n| n.starts_with("tolerance: ranks")));
}

#[test]
fn syntax_error_reports_location() {
    let f = temp_problem("{\n  \"format_version\": \"1\",\n  \"tasks\": [\n}");
    let o = run(&[f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn bad_rational_is_a_parse_error() {
    let f = temp_problem(
        r#"{"format_version": "1",
            "lie_algebras": {"a": {"dim": 2, "brackets": [{"i": 0, "j": 1, "value": ["1/0", "0"]}]}}}"#,
    );
    let o = run(&[f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lie_algebras.a.brackets[0].value[0]"), "{}", stderr(&o));
}

#[test]
fn unknown_reference_is_a_parse_error() {
    let f = temp_problem(r#"{"format_version": "1", "tasks": [{"kind": "validate", "skeleton": "nope"}]}"#);
    let o = run(&[f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown skeleton `nope`"));
}

#[test]
fn broken_skeleton_exits_with_invariant_code() {
    // drho restricted to l must be the adjoint action, which is zero on an abelian l
    let f = temp_problem(
        r#"{"format_version": "1",
            "lie_algebras": {"a": {"dim": 1}},
            "skeletons": {"bad": {"l": "a", "l_embed": [["1"], ["0"]], "drho": [[["1", "0"], ["0", "0"]]]}},
            "tasks": [{"kind": "validate", "skeleton": "bad"}]}"#,
    );
    let o = run(&[f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("invariant violated"));
}

#[test]
fn jacobi_failure_exits_with_invariant_code() {
    let f = temp_problem(
        r#"{"format_version": "1",
            "lie_algebras": {"bad": {"dim": 3, "brackets": [
                {"i": 0, "j": 1, "value": ["0", "0", "1"]},
                {"i": 1, "j": 2, "value": ["0", "1", "0"]}]}}}"#,
    );
    let o = run(&[f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unknown_task_name() {
    let o = run(&[sample().to_str().unwrap(), "--task", "nothing-here"]);
    assert_eq!(o.status.code(), Some(2));
}
