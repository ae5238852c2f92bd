use std::process::Command;

fn fks() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fks"))
}

#[test]
fn lists_problems() {
    let out = fks().arg("list-problems").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for p in ["sod1d", "vortex2d", "sod2d", "implosion2d"] {
        assert!(text.contains(p));
    }
}

#[test]
fn run_honours_output_env_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = fks()
        .env("FKS_OUTPUT_DIR", dir.path())
        .args([
            "run",
            "--problem",
            "sod1d",
            "--scheme",
            "euler-muscl",
            "--set",
            "mesh.cells=40",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("run.scheme = euler-muscl"));
    assert!(manifest.contains("mesh.cells = 40"));
}

#[test]
fn run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "run.problem = sod1d\nrun.scheme = euler-upwind\nmesh.cells = 30\ntime.final = 0.01\n",
    )
    .unwrap();
    let out = fks()
        .args(["--output-dir"])
        .arg(dir.path().join("out"))
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("out/timing.csv").exists());
}

#[test]
fn bad_input_exits_nonzero() {
    let out = fks().args(["run", "--problem", "nope"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown problem"));
    let out = fks()
        .args(["run", "--set", "mesh.cells=abc"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
