//! End-to-end tests of the `mori-class` binary: exit codes, the final
//! machine line, error locations and the census table.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mori-class"))
}

fn testdata(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "testdata", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn invariants_of_the_double_cover() {
    let out = run(&["invariants", &testdata("xx-dim2.mfs")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("b3=40"), "{text}");
    assert!(text.contains("K3=-6"), "{text}");
    assert!(text.contains("cf_divisibility=8"), "{text}");
    assert!(text.contains("w2_type=III1"), "{text}");
}

#[test]
fn compare_cross_dimension_exit_zero() {
    let out = run(&[
        "compare",
        &testdata("xx-dim1.mfs"),
        &testdata("xx-dim2.mfs"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.lines().last().unwrap_or("") == "verdict=diffeomorphic branch=cross",
        "{text}"
    );
}

#[test]
fn compare_plane_bundle_presentations() {
    let out = run(&[
        "compare",
        &testdata("p2xp1-dim1.mfs"),
        &testdata("p2xp1-dim2.mfs"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("branch=cross"));
}

#[test]
fn compare_quadric_twists_exit_one() {
    let out = run(&[
        "compare",
        &testdata("quadric-m1.mfs"),
        &testdata("quadric-m2.mfs"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict=not_diffeomorphic"), "{text}");
}

#[test]
fn compare_exceptional_pair_exit_two() {
    let out = run(&[
        "compare",
        &testdata("exceptional-a.mfs"),
        &testdata("exceptional-b.mfs"),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.lines().last().unwrap_or("") == "verdict=undetermined_finite branch=B",
        "{text}"
    );
}

#[test]
fn compare_json_lines() {
    let out = run(&[
        "compare",
        &testdata("quadric-m1.mfs"),
        &testdata("quadric-m2.mfs"),
        "--json-lines",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let mut lines: Vec<&str> = text.lines().collect();
    let machine = lines.pop().unwrap();
    assert!(machine.starts_with("verdict="), "{machine}");
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).expect("valid JSON line");
        assert!(v.is_object(), "{line}");
    }
}

#[test]
fn parse_error_carries_file_and_line() {
    let dir = std::env::temp_dir().join("mori-class-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.mfs");
    std::fs::write(&path, "[mfs]\nbase_dim = 1\nK = 7\ntwist = 0\n").unwrap();
    let out = bin()
        .args(["invariants", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("bad.mfs:3"), "{err}");
    assert!(err.contains("{1, ..., 6, 8, 9}"), "{err}");
}

#[test]
fn missing_file_exits_three() {
    let out = run(&["invariants", "/nonexistent/nothing.mfs"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn census_quadric_twists() {
    let out = run(&[
        "census",
        "--family",
        "dp1",
        "--min-k",
        "8",
        "--max-k",
        "8",
        "--min-twist",
        "-5",
        "--max-twist",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.trim_end().ends_with("classes=5"), "{text}");
}

#[test]
fn census_fano_by_degree() {
    let out = run(&[
        "census",
        "--family",
        "fano",
        "--min-degree",
        "1",
        "--max-degree",
        "5",
        "--min-ex",
        "4",
        "--max-ex",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim_end().ends_with("classes=5"));
}

#[test]
fn census_refuses_missing_bounds() {
    let out = run(&["census", "--family", "fano"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("degree"));
}

#[test]
fn census_singular_bundles_over_the_plane() {
    let out = run(&[
        "census",
        "--family",
        "cb-singular",
        "--min-q",
        "0",
        "--max-q",
        "0",
        "--min-c1",
        "-8",
        "--max-c1",
        "-8",
        "--min-c2",
        "-8",
        "--max-c2",
        "-8",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("b3=40"), "{text}");
    assert!(text.trim_end().ends_with("classes=1"), "{text}");
}

#[test]
fn verify_cubic_suite_passes() {
    let out = run(&["verify", "--suite", "cubic"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 failed"));
}

#[test]
fn bad_flag_exits_three() {
    let out = run(&["census", "--family", "unknown-family"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("compare"));
}
