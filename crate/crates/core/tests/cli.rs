//! End-to-end runs of the `sblfem` binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sblfem"))
}

#[test]
fn study1d_with_config_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    std::fs::write(
        &cfg,
        "dimension = 1\nproblem = \"poly\"\neps = [1.0]\np_min = 3\np_max = 5\nrecord_timing = false\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .arg("study1d")
        .arg(&cfg)
        .args([
            "--eps",
            "1e-2,1e-4",
            "--p-max",
            "6",
            "--problem",
            "layered",
            "--out",
        ])
        .arg(&out)
        .env("SBL_FEM_THREADS", "1")
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    // header plus 2 eps values times p = 3..=6
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.starts_with("layered,") && l.ends_with(",0.000,ok")));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["problem"], "layered");
    assert!(std::fs::read_to_string(out.join("plot.gp"))
        .unwrap()
        .contains("results.csv"));
}

#[test]
fn invalid_override_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["study2d", "--p-max", "9", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("p range"));
}

#[test]
fn verify_prints_json() {
    let out = bin().args(["verify", "CHI_BOUNDS"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "CHI_BOUNDS");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 7);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn dump_mesh_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    for dim in ["1", "2"] {
        let status = bin()
            .args([
                "dump-mesh",
                "--dimension",
                dim,
                "--eps",
                "1e-3",
                "--p",
                "4",
                "--out",
            ])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("mesh.json")).unwrap())
                .unwrap();
        if dim == "1" {
            assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
        } else {
            assert_eq!(v["needle"], true);
        }
    }
}
