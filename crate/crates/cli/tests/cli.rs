use std::fs;
use std::process::Command;

fn wsi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsi"))
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "solver = \"sv\"\nn = 64\ninitial = \"gaussian(0.1, 12, 2)\"\nhorizon = 0.2\n").unwrap();
    let out = dir.path().join("out");
    let status = wsi().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    for f in ["snapshots.csv", "solid.csv", "energy.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn invalid_config_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "solver = \"bous\"\nmu = 0.1\neps = 0.5\nspeed = 3\n").unwrap();
    let output = wsi().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("line 3: `eps`"), "{err}");
    assert!(err.contains("line 4: `speed`: unknown key"), "{err}");
}

#[test]
fn verify_reports_one_line_per_criterion() {
    let output = wsi().args(["verify", "picard"]).output().unwrap();
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "{text}");
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("[PASS] criterion  5"));
}

#[test]
fn seedless_refuses_random_criteria() {
    let output = wsi().args(["verify", "velocity-bound", "--seedless"]).output().unwrap();
    assert!(!output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("[FAIL] criterion  6"), "{text}");
    assert!(text.contains("[PASS] criterion  7"), "{text}");
}
