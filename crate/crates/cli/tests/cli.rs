use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn algeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algeo"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_prints_the_diagonal() {
    let o = algeo(&[
        "solve",
        "--algebra",
        "C2.alg",
        "--vars",
        "2",
        "--system",
        "diag.sys",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(0,0)\n(1,1)\n");
}

#[test]
fn lattice_dot_has_five_nodes() {
    let o = algeo(&[
        "lattice",
        "--algebra",
        "C2.alg",
        "--vars",
        "2",
        "--format",
        "dot",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("digraph lattice {"));
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 5);
}

#[test]
fn bad_table_exits_two_naming_file_and_line() {
    let o = algeo(&[
        "solve",
        "--algebra",
        "broken.alg",
        "--vars",
        "2",
        "--system",
        "diag.sys",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("broken.alg:4:"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn system_parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("bad.sys");
    std::fs::write(&sys, "# comment\nx1 = x2\n(add x1) = e\n").unwrap();
    let o = algeo(&[
        "solve",
        "--algebra",
        "C2.alg",
        "--vars",
        "2",
        "--system",
        sys.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.sys:3"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_inline_pair_exit_two() {
    let o = algeo(&["solve", "--algebra", "nope.alg", "--vars", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.alg"));
    let o = algeo(&[
        "closure-pair",
        "--algebra",
        "C2.alg",
        "--vars",
        "1",
        "--pair",
        "(mul x1 x1) = e",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--pair"));
    let o = algeo(&[
        "closure-pair",
        "--algebra",
        "C2.alg",
        "--vars",
        "1",
        "--pair",
        "x2 = e",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn representation_errors_exit_two() {
    let o = algeo(&["rep-solve", "--rep", "bad.rep", "--xvars", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.rep"));
    let o = algeo(&["rep-triangular", "--rep", "sign.rep", "--rep", "reg3.rep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("modulus mismatch"));
}

#[test]
fn caps_exit_three_naming_the_cap() {
    let o = algeo(&[
        "solve",
        "--algebra",
        "C3.alg",
        "--vars",
        "5",
        "--max-points",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--max-points"));
    let o = algeo(&[
        "identities",
        "--algebra",
        "C2.alg",
        "--vars",
        "2",
        "--depth",
        "2",
        "--max-terms",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--max-terms"));
    let o = algeo(&[
        "rep-wreath",
        "--rep",
        "sign.rep",
        "--group",
        "c2.grp",
        "--max-group-order",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--max-group-order"));
    let o = algeo(&[
        "equiv",
        "--algebra",
        "C2.alg",
        "--algebra",
        "C3.alg",
        "--vars",
        "2",
        "--depth",
        "2",
        "--system-limit",
        "3",
        "--max-systems",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--max-systems"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(algeo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        algeo(&["equiv", "--algebra", "C2.alg"]).status.code(),
        Some(2)
    );
    let o = algeo(&[
        "solve",
        "--algebra",
        "C2.alg",
        "--vars",
        "1",
        "--format",
        "dot",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.dot");
    let args = [
        "lattice",
        "--algebra",
        "M2.alg",
        "--vars",
        "2",
        "--format",
        "dot",
    ];
    let printed = stdout(&algeo(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let o = algeo(&with_out);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "equiv",
        "--algebra",
        "C2.alg",
        "--algebra",
        "C3.alg",
        "--vars",
        "2",
        "--depth",
        "2",
    ];
    let first = algeo(&args);
    for _ in 0..3 {
        assert_eq!(algeo(&args).stdout, first.stdout);
    }
}

#[test]
fn help_documents_cap_defaults() {
    let text = stdout(&algeo(&["solve", "--help"]));
    for needle in [
        "--max-points",
        "1000000",
        "--max-terms",
        "100000",
        "--max-systems",
    ] {
        assert!(text.contains(needle), "{needle} missing from help");
    }
}

#[test]
fn triangular_output_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.rep");
    let o = algeo(&[
        "rep-triangular",
        "--rep",
        "sign.rep",
        "--rep",
        "sign.rep",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = algeo(&[
        "rep-solve",
        "--rep",
        path.to_str().unwrap(),
        "--xvars",
        "1",
        "--yvars",
        "0",
        "--report",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("points: 4"));
}
