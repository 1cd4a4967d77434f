//! End-to-end runs of the `rrtower` binary.

use std::fs;
use std::process::{Command, Output};

fn rrtower(args: &[&str], cache_env: Option<&std::path::Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rrtower"));
    cmd.args(args).env_remove("RRTOWER_CACHE");
    if let Some(dir) = cache_env {
        cmd.env("RRTOWER_CACHE", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn semigroup_and_genus() {
    let o = rrtower(&["semigroup", "--level", "3"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim_end(), "0; 6; 8; 11-12; 14-inf");
    let o = rrtower(&["genus", "--level", "5"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("49"));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["basis", "--level", "3", "--s", "20", "--format", "json"];
    let a = rrtower(&args, None);
    let b = rrtower(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_from_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let args = ["ladder", "--level", "3", "--cache", flag];
    let fresh = rrtower(&args, Some(env_dir.path()));
    assert!(fresh.status.success());
    let written: Vec<_> = fs::read_dir(env_dir.path()).unwrap().collect();
    assert_eq!(written.len(), 1);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 0);
    let cached = rrtower(&args, Some(env_dir.path()));
    assert_eq!(fresh.stdout, cached.stdout);
    let plain = rrtower(&["ladder", "--level", "3"], None);
    assert_eq!(fresh.stdout, plain.stdout);
}

#[test]
fn code_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let o = rrtower(
        &["code", "--level", "1", "--s", "3", "--distance", "--matrix-out", path.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("d=6"));
    let csv = fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().all(|l| l.split(',').count() == 8));
}

#[test]
fn exit_codes() {
    assert_eq!(rrtower(&["--help"], None).status.code(), Some(0));
    assert_eq!(rrtower(&["ladder", "--level", "11"], None).status.code(), Some(2));
    assert_eq!(rrtower(&["semigroup", "--level", "2", "--prime", "9"], None).status.code(), Some(2));
    assert_eq!(rrtower(&["expand", "--level", "1", "--gen", "3"], None).status.code(), Some(2));
    assert_eq!(rrtower(&["frobnicate"], None).status.code(), Some(2));
    let o = rrtower(&["ladder", "--level", "11"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
}
