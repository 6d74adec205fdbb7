use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pucci-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn pucci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pucci")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn radial(out: &Path, extra: &[&str]) -> Output {
    let cfg = configs().join("radial_ball.json");
    let mut args = vec!["radial", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    pucci(&args)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constants_print_to_stdout() {
    let out = pucci(&["constants", "--N", "2", "--q", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["c"].as_f64().unwrap() - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    // The constants are defined for finite q only.
    let out = pucci(&["constants", "--N", "3", "--q", "inf"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("q > 1"), "{}", stderr(&out));
}

#[test]
fn manifest_checksums_match_the_artifacts() {
    let dir = scratch("manifest");
    let out = radial(&dir, &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m = manifest(&dir);
    assert_eq!(m["command"], "radial");
    let artifacts = m["artifacts"].as_object().unwrap();
    assert!(artifacts.contains_key("radial.csv"));
    for (name, entry) in artifacts {
        let bytes = std::fs::read(dir.join(name)).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(entry["sha256"], hex.as_str(), "{name}");
        assert_eq!(entry["bytes"], bytes.len());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn overrides_reach_the_resolved_config() {
    let (a, b) = (scratch("base"), scratch("override"));
    assert_eq!(code(&radial(&a, &[])), 0);
    assert_eq!(code(&radial(&b, &["--set", "epsilon=0.1", "--set", "points.0=0.5"])), 0);
    let cfg = &manifest(&b)["config"];
    assert_eq!(cfg["epsilon"], 0.1);
    assert_eq!(cfg["points"][0], 0.5);
    assert!(cfg.get("output").is_none());
    let csv_a = std::fs::read_to_string(a.join("radial.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.join("radial.csv")).unwrap();
    assert_ne!(csv_a, csv_b);
    assert!(csv_b.starts_with("r,log_u,discrepancy\n5.0000000000000000e-1,"));
    std::fs::remove_dir_all(&a).unwrap();
    std::fs::remove_dir_all(&b).unwrap();
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = scratch("invalid");
    let out = radial(&dir, &["--set", "params.Lambda=0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("lambda"), "{}", stderr(&out));

    let out = radial(&dir, &["--set", "bogus=1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("'bogus'"), "{}", stderr(&out));

    let out = radial(&dir, &["--set", "params.Lambda=two"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("params.Lambda"), "{}", stderr(&out));

    assert_eq!(code(&pucci(&["radial", "--config", "/nonexistent/config.json"])), 2);
    assert_eq!(code(&pucci(&["no-such-command"])), 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn nonconvergence_exits_with_three() {
    let dir = scratch("nonconvergence");
    let cfg = configs().join("elliptic_disk.json");
    let out = pucci(&[
        "solve-elliptic",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "options.max_iterations=1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("converge"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn selftest_is_green_and_repeatable() {
    let (a, b) = (scratch("selftest-a"), scratch("selftest-b"));
    for dir in [&a, &b] {
        let out = pucci(&["selftest", "--seed", "7", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    }
    for name in ["selftest.json", "manifest.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let report: Value = serde_json::from_slice(&std::fs::read(a.join("selftest.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
    std::fs::remove_dir_all(&a).unwrap();
    std::fs::remove_dir_all(&b).unwrap();
}
