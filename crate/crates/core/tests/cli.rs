//! End-to-end runs of the `jordanlab` binary, with golden JSON documents.
//! Set `JORDANLAB_UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> String {
    manifest().join("tests/data").join(name).display().to_string()
}

fn jordanlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jordanlab"))
        .args(args)
        .env_remove("JORDANLAB_MAX_ORDER")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str, args: &[&str]) {
    golden_with_code(name, args, 0);
}

fn golden_with_code(name: &str, args: &[&str], want: i32) {
    let (code, stdout, stderr) = jordanlab(args);
    assert_eq!(code, want, "{stderr}");
    let path = manifest().join("tests/golden").join(name);
    if std::env::var_os("JORDANLAB_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(stdout, expected, "golden mismatch for {name}");
}

#[test]
fn golden_check_example() {
    golden("check_example.json", &["--json", "check", &data("example.scheme")]);
}

#[test]
fn golden_fusions_z5() {
    golden("fusions_z5.json", &["--json", "fusions", &data("z5.scheme")]);
}

#[test]
fn golden_loop_check_o16() {
    golden("loop_check_o16.json", &["--json", "loop", "check", &data("o16.loop")]);
}

#[test]
fn golden_autonomy_o16() {
    golden("autonomy_o16.json", &["--json", "autonomy", &data("o16.scheme")]);
}

#[test]
fn golden_recognize_jcal() {
    golden("recognize_jcal_z3.json", &["--json", "recognize", &data("jcal_z3.scheme")]);
}

#[test]
fn golden_error_document() {
    golden_with_code("error_not_abelian.json", &["--json", "construct", "jcal", "named:S3"], 1);
}

#[test]
fn example_summary_line() {
    let (code, stdout, _) = jordanlab(&["check", &data("example.scheme")]);
    assert_eq!(code, 0);
    assert!(stdout.contains("summary: JS, non-regular, thin, ratio 3/2"), "{stdout}");
}

#[test]
fn ra_loop_then_loop_check() {
    let (code, table, stderr) = jordanlab(&["construct", "ra-loop", "--base", "named:Q8", "--g0", "s"]);
    assert_eq!(code, 0, "{stderr}");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.loop");
    std::fs::write(&path, table).unwrap();
    let (code, stdout, _) = jordanlab(&["loop", "check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.lines().any(|l| l == "ra: true"), "{stdout}");
}

#[test]
fn loop_relabelling_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z2.loop");
    std::fs::write(&path, "2\n1 0\n0 1\n").unwrap();
    let (code, _, stderr) = jordanlab(&["loop", "check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stderr.contains("identity was element 1"), "{stderr}");
}

#[test]
fn syntax_errors_name_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.loop");
    std::fs::write(&path, "2\n0 1\n1 0 1\n").unwrap();
    let (code, _, stderr) = jordanlab(&["loop", "check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("SyntaxError at line 3, column 5"), "{stderr}");
    assert!(stderr.contains(&path.display().to_string()), "{stderr}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(jordanlab(&["closure", "--kind", "xyz", "f"]).0, 2);
    assert_eq!(jordanlab(&["construct", "group-scheme", "bogus:1"]).0, 2);
}

#[test]
fn order_limit_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_jordanlab"))
        .args(["closure", "--kind", "wl", &data("o16.scheme")])
        .env("JORDANLAB_MAX_ORDER", "closure:8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OrderTooLarge"));
    let out = Command::new(env!("CARGO_BIN_EXE_jordanlab"))
        .args(["autonomy", "--brute-force", &data("z5.scheme")])
        .env("JORDANLAB_MAX_ORDER", "search:4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn closure_with_seed_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let trivial = dir.path().join("t.scheme");
    std::fs::write(&trivial, "5 2\n0 1 1 1 1\n1 0 1 1 1\n1 1 0 1 1\n1 1 1 0 1\n1 1 1 1 0\n").unwrap();
    // adjacency of the directed 5-cycle
    let seed = dir.path().join("c5.mat");
    std::fs::write(&seed, "5\n0 1 0 0 0\n0 0 1 0 0\n0 0 0 1 0\n0 0 0 0 1\n1 0 0 0 0\n").unwrap();
    let (code, stdout, stderr) = jordanlab(&[
        "--json",
        "closure",
        "--kind",
        "wl",
        trivial.to_str().unwrap(),
        "--seed-matrices",
        seed.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["rank"], 5);
}
