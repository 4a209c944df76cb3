//! End-to-end runs of the `hadamard` binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hadamard"));
    c.env_remove("HADAMARD_OUT");
    c
}

fn run_into(dir: &Path, args: &[&str]) -> std::process::Output {
    bin().args(args).arg("--out").arg(dir).output().unwrap()
}

#[test]
fn rerun_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        let out = run_into(d, &["two-point", "--seed", "11"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["results.csv", "defects.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_selects_experiment_and_env_overrides_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[experiment]\nname = chord-fit\nseed = 4\nout = ignored\n").unwrap();
    let target = dir.path().join("from_env");
    let out = bin().arg("--config").arg(&cfg).env("HADAMARD_OUT", &target).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(target.join("results.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.starts_with("chord-fit,")));
}

#[test]
fn failing_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    std::fs::write(&cfg, "[experiment]\nname = chord-fit\n[tolerance]\nrelative = 1e-14\n").unwrap();
    let out = run_into(&dir.path().join("o"), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[experiment]\nname = chord-fit\nbogus = 1\n").unwrap();
    let out = run_into(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
}

#[test]
fn list_names_every_experiment() {
    let out = bin().arg("--list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["spaces-selftest", "chern-lashof", "develop", "hull-aperture", "schur-suite"] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
}
