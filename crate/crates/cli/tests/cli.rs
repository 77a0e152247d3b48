//! End-to-end runs of the `dihom` binary: golden output lines, exit codes,
//! and the machine format.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dihom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dihom")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn homology_swiss() {
    let out = dihom(&["homology", "--builtin", "swiss"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("36 states"), "{text}");
    assert!(text.contains("H^-_1 = Z^2"), "{text}");
}

#[test]
fn homology_merging_dirseg() {
    let out = dihom(&["homology", "--builtin", "dirseg", "--merging"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("H^+_0 = Z"));
}

#[test]
fn homology_per_state_branch2() {
    let out = dihom(&["homology", "--builtin", "branch2", "--per-state"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("c: components 1, H~0 = 0, H~1 = Z"), "{text}");
}

#[test]
fn machine_format_matches_human_data() {
    let human = dihom(&["homology", "--builtin", "branch1"]);
    let machine = dihom(&["homology", "--builtin", "branch1", "--format", "machine"]);
    assert_eq!(code(&human), 0);
    assert_eq!(code(&machine), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&machine)).unwrap();
    assert_eq!(v["command"], "homology");
    assert_eq!(v["groups"][0]["betti"], 2);
    assert_eq!(v["groups"][1]["betti"], 1);
    assert!(stdout(&human).contains("H^-_0 = Z^2"));
    assert!(stdout(&human).contains("H^-_1 = Z"));
}

#[test]
fn les_phi_bottom_row() {
    let out = dihom(&["les", "--builtin", "phi"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("Z -> Z^2 -> Z"), "{text}");
    assert!(text.contains("sequence exact"), "{text}");
}

#[test]
fn les_identity_on_swiss() {
    let out = dihom(&["les", "--identity", "--builtin", "swiss"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("sequence exact"));
}

#[test]
fn check_t_phi_passes_with_tables() {
    let out = dihom(&["check-t", "--builtin", "phi"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("restriction isomorphism: pass"), "{text}");
    assert!(text.contains("germ pi0 totals: 1 | 2"), "{text}");
}

#[test]
fn check_t_failure_exits_2() {
    let dir = std::env::temp_dir().join("dihom_cli_checkt");
    std::fs::create_dir_all(&dir).unwrap();
    let x = dir.join("x.flow");
    let y = dir.join("y.flow");
    let m = dir.join("m.map");
    std::fs::write(&x, "flow I\nedge u : 0 -> 1\n").unwrap();
    std::fs::write(
        &y,
        "flow branch1\nedge e01 : 0 -> 1\nedge e12 : 1 -> 2\nedge e03 : 0 -> 3\n",
    )
    .unwrap();
    std::fs::write(&m, "map incl\nstate 0 -> 0\nstate 1 -> 1\ngen u -> e01\n").unwrap();
    let out = dihom(&[
        "check-t",
        x.to_str().unwrap(),
        y.to_str().unwrap(),
        "--map",
        m.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("surrounded by the image: FAIL"), "{text}");
}

#[test]
fn pv_swiss_counts_and_roundtrip() {
    let out = dihom(&["pv", "--grid", "5x5", "--forbidden", "plus"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("36 states, 56 edges, 20 squares"));

    let path: PathBuf = std::env::temp_dir().join("dihom_cli_sw.flow");
    let out = dihom(&[
        "pv",
        "--grid",
        "5x5",
        "--forbidden",
        "plus",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = dihom(&["homology", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("H^-_1 = Z^2"));
}

#[test]
fn pv_small_grids() {
    let out = dihom(&["pv", "--grid", "1x1"]);
    assert!(stdout(&out).contains("4 states, 4 edges, 1 squares"));
    let out = dihom(&["pv", "--grid", "2x1", "--forbidden", "(0,0),(1,0)"]);
    assert!(stdout(&out).contains("6 states, 6 edges, 0 squares"));
}

#[test]
fn oracle_builtins_agree() {
    for name in ["dirseg", "branch1", "branch2"] {
        let out = dihom(&["oracle", "--builtin", name]);
        assert_eq!(code(&out), 0, "{name}");
        assert!(stdout(&out).contains("agree"), "{name}");
    }
    let out = dihom(&["oracle", "--builtin", "swiss", "--max-dim", "3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn parse_failure_exits_1() {
    let path = std::env::temp_dir().join("dihom_cli_bad.flow");
    std::fs::write(&path, "flow bad\nedge e : 0 ->\n").unwrap();
    let out = dihom(&["homology", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn validation_failure_exits_1() {
    let path = std::env::temp_dir().join("dihom_cli_loop.flow");
    std::fs::write(&path, "flow l\nedge e : 0 -> 0\n").unwrap();
    let out = dihom(&["homology", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle"));
}

#[test]
fn unknown_builtin_exits_1() {
    let out = dihom(&["homology", "--builtin", "nope"]);
    assert_eq!(code(&out), 1);
}
