//! End-to-end tests of the command-line interface: exit codes, output
//! determinism, and the documented examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn torloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn emult_prints_the_weighted_plane_table() {
    let out = torloc(&["emult", "--fan", &fixture("p112.fan")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1 / (1 - e^{u2})(1 - e^{u1})"));
    assert!(text.contains("(e^{u1-u2} + 1) / (1 - e^{-u2})(1 - e^{2*u1-u2})"));
    assert!(text.contains("1 / (1 - e^{-u1})(1 - e^{-2*u1+u2})"));
}

#[test]
fn emult_output_is_deterministic() {
    let a = stdout(&torloc(&["emult", "--fan", &fixture("p112.fan"), "--format", "structured"]));
    let b = stdout(&torloc(&["emult", "--fan", &fixture("p112.fan"), "--format", "structured"]));
    assert_eq!(a, b);
    assert!(a.starts_with("torloc.v1 emult\n"));
}

#[test]
fn euler_with_oracle_agrees() {
    let out = torloc(&[
        "euler",
        "--fan",
        &fixture("p1.fan"),
        "--divisor",
        "d2",
        "--oracle",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("e^{2*u1} + e^{u1} + 1"));
    assert!(text.contains("agree"));
}

#[test]
fn integrate_good_and_bad_tuples() {
    let ok = torloc(&[
        "integrate",
        "--fan",
        &fixture("p1.fan"),
        "--tuple",
        &fixture("p1_d2.tuple"),
    ]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("e^{2*u1} + e^{u1} + 1"));

    let bad = torloc(&[
        "integrate",
        "--fan",
        &fixture("p1.fan"),
        "--tuple",
        &fixture("p1_bad.tuple"),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("non-integral"));
}

#[test]
fn gkm_check_pass_and_fail() {
    let ok = torloc(&[
        "gkm-check",
        "--fan",
        &fixture("p1.fan"),
        "--tuple",
        &fixture("p1_d2.tuple"),
    ]);
    assert!(ok.status.success());
    let bad = torloc(&[
        "gkm-check",
        "--fan",
        &fixture("p1.fan"),
        "--tuple",
        &fixture("p1_bad.tuple"),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("violated wall"));
}

#[test]
fn dual_basis_determinant() {
    // Basis cones for P(1,1,2): the origin (id of the empty cone), the ray
    // of the third generator, and the singular maximal cone.  Ids are
    // stable for a given fan file: origin is 0, ray <2> is 6, cone <0,2>
    // is 3 (cones are sorted by their ray lists).
    let out = torloc(&[
        "dual-basis",
        "--fan",
        &fixture("p112.fan"),
        "--cones",
        "0,6,3",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("determinant = -e^{u2} - e^{-u1+2*u2}"), "{text}");
}

#[test]
fn rr_check_passes_on_p112() {
    let out = torloc(&["rr-check", "--fan", &fixture("p112.fan"), "--adams", "2"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("todd"));
    assert!(text.contains("adams-rr"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn adams_check_on_divisor_class() {
    let out = torloc(&[
        "adams-check",
        "--fan",
        &fixture("p1.fan"),
        "--tuple",
        &fixture("p1_d2.tuple"),
        "--adams",
        "3",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("pass"));
}

#[test]
fn spherical_kind_check() {
    let ok = torloc(&[
        "spherical-check",
        "--kind",
        "pv",
        "--tuple",
        &fixture("pv_line.tuple"),
    ]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("member"));

    let bad = torloc(&[
        "spherical-check",
        "--kind",
        "pv",
        "--tuple",
        &fixture("pv_outlier.tuple"),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("not a member"));
    assert!(text.contains("violated"));
}

#[test]
fn spherical_skeleton_check() {
    let ok = torloc(&[
        "spherical-check",
        "--skeleton",
        &fixture("pv.skeleton"),
        "--tuple",
        &fixture("pv_skeleton_pass.tuple"),
    ]);
    assert!(ok.status.success(), "{}", stdout(&ok));
}

#[test]
fn resolve_adds_the_expected_ray() {
    let out = torloc(&["resolve", "--fan", &fixture("p112.fan")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ray 0 -1"));
    assert!(text.lines().filter(|l| l.starts_with("cone ")).count() == 4);
}

#[test]
fn input_errors_exit_two() {
    let missing = torloc(&["emult", "--fan", "/nonexistent.fan"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown_divisor = torloc(&[
        "euler",
        "--fan",
        &fixture("p1.fan"),
        "--divisor",
        "nope",
    ]);
    assert_eq!(unknown_divisor.status.code(), Some(2));
}
