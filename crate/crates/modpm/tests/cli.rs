//! End-to-end tests of the command-line driver: dispatch, exit codes, and
//! report determinism.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_modpm"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn sturm_prints_14() {
    let (code, stdout, _) = run(&["sturm", "52", "2", "--g0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "14\n");
    let (code, stdout, _) = run(&["sturm", "26", "2", "--g0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "7\n");
}

#[test]
fn missing_file_is_input_error() {
    let (code, _, stderr) = run(&["classify", "missing.basis", "--p", "3", "--m", "2"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn unknown_flags_rejected() {
    let (code, _, _) = run(&["sturm", "52", "2", "--g0", "--frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn classify_is_deterministic_and_finds_h() {
    let args = [
        "classify",
        &fixture("S_2_G0_52.basis"),
        "--p",
        "3",
        "--m",
        "2",
        "--bound",
        "14",
        "--catalog",
        &fixture("catalog_52.cat"),
    ];
    let (code, out1, _) = run(&args);
    assert_eq!(code, 0);
    let (_, out2, _) = run(&args);
    assert_eq!(out1, out2, "reports must be byte-deterministic");
    // the h system: T_5 -> 5, no strong match
    assert!(out1.contains("5=5"), "h eigen system missing:\n{out1}");
    assert!(
        out1.contains("none (catalog may be incomplete"),
        "h should not match"
    );
    // the f system: T_5 -> 2 matches f
    assert!(out1.contains("5=2"));
    assert!(out1.contains("strong-match: f (prime-choice 0)"));
    assert!(out1.contains("residual-irreducibility: unknown"));
}

#[test]
fn halfsum_emits_eigenvalue_table() {
    let (code, out, _) = run(&[
        "halfsum",
        &fixture("S_2_G0_52.basis"),
        "--f",
        &fixture("f_52.qexp"),
        "--g",
        &fixture("gtilde_52.qexp"),
        "--p",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("T5 -> 5"));
    assert!(out.contains("possibly-liftable: false"));
    // h expansion mod 9 begins 1,0,3,0,5,0,4
    assert!(out.contains("h-expansion: 1,0,3,0,5,0,4"), "report:\n{out}");
}

#[test]
fn strip_level_negative_exit_code() {
    // a random vector far from the level-26 span: plant a fake basis file
    let dir = std::env::temp_dir().join("modpm-strip-negative");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bogus.qexp");
    let mut row = vec!["1".to_string()];
    for i in 2..=40 {
        row.push(((i * 7919) % 23).to_string());
    }
    std::fs::write(
        &path,
        format!(
            "space level=130 weight=2 group=g0 char=none trunc=40 coeffring=int\n{}\n",
            row.join(",")
        ),
    )
    .unwrap();
    let (code, out, _) = run(&[
        "strip-level",
        &path.display().to_string(),
        "--target-level",
        "26",
        "--cmax",
        "3",
        "--p",
        "5",
        "--m",
        "2",
        "--basis-dir",
        &PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .display()
            .to_string(),
        "--bound",
        "30",
    ]);
    assert_eq!(
        code, 1,
        "search exhausted is a mathematical negative:\n{out}"
    );
    assert!(out.contains("result: not found"));
    assert!(out.contains("does not prove nonexistence"));
}

#[test]
fn hecke_matrix_cache_round_trip() {
    let dir = std::env::temp_dir().join("modpm-cache-test");
    let _ = std::fs::remove_dir_all(&dir);
    let args = [
        "hecke-matrix",
        &fixture("S_2_G0_26.basis"),
        "2",
        "--cache-dir",
        &dir.display().to_string(),
    ];
    let (code, out1, _) = run(&args);
    assert_eq!(code, 0);
    assert!(out1.contains("cache: miss"));
    let (code, out2, _) = run(&args);
    assert_eq!(code, 0);
    assert!(out2.contains("cache: hit"));
    // matrices identical
    let tail1 = out1.split("matrix rows=").nth(1).unwrap();
    let tail2 = out2.split("matrix rows=").nth(1).unwrap();
    assert_eq!(tail1, tail2);
}

#[test]
fn obstruct_verdicts() {
    let (code, out, _) = run(&[
        "obstruct", "--level", "9", "--p", "3", "--m", "2", "--char", "9:2",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: blocked"));
    assert!(out.contains("shortcut-agrees: true"));
    let (code, out, _) = run(&[
        "obstruct", "--level", "9", "--p", "3", "--m", "1", "--char", "9:2",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: not_blocked_by_this_test"));
}

#[test]
fn divide_reports_congruence_failures() {
    let dir = std::env::temp_dir().join("modpm-divide-test");
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.qexp");
    std::fs::write(
        &good,
        "space level=1 weight=2 group=g0 char=none trunc=3 coeffring=int\n3,9,27\n",
    )
    .unwrap();
    let (code, out, _) = run(&[
        "divide",
        &good.display().to_string(),
        "--pi",
        "3",
        "--m",
        "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("expansion: 1,3,9"));
    let bad = dir.join("bad.qexp");
    std::fs::write(
        &bad,
        "space level=1 weight=2 group=g0 char=none trunc=3 coeffring=int\n3,1,27\n",
    )
    .unwrap();
    let (code, out, _) = run(&[
        "divide",
        &bad.display().to_string(),
        "--pi",
        "3",
        "--m",
        "1",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("congruence fails"));
    assert!(out.contains("index 2"), "failure location reported:\n{out}");
}

#[test]
fn equalize_reports_powers() {
    let (code, out, _) = run(&["equalize", &fixture("f_52.qexp"), "--p", "5", "--m", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("equalizer-power: 0"));
}

#[test]
fn seed_is_echoed_into_reports() {
    let (code, out, _) = run(&[
        "classify",
        &fixture("S_2_G0_26.basis"),
        "--p",
        "3",
        "--m",
        "1",
        "--bound",
        "14",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("seed: 7"), "report:\n{out}");
}
