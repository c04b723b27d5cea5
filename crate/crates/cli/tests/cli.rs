use std::path::Path;
use std::process::Command;

fn acmf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_acmf"))
}

const TINY: &str = r#"
name = "tiny"

[geometry]
kind = "flat-torus"
side = 1.0

[grid]
shape = [64, 64]

[epsilon]
values = [0.1, 0.08]

[interface]
center = [0.5, 0.5]
radius = 0.3

[data]
mode = "well-prepared"

[stepper]
scheme = "imex"
dt_safety = 0.5
t_end = 0.004
sample_interval = 0.001

[kernel]
pole_angle = 0.0
t0 = 0.001
s = 0.002

[windows]
disc_radius = 0.2
disc_time = [0.001, 0.003]
density_r_max = 0.2
bv_time = [0.001, 0.003]
bump_radius = 0.15

[output]
dir = "unused"
"#;

fn write_tiny(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("tiny.toml");
    std::fs::write(&p, TINY).unwrap();
    p
}

#[test]
fn profile_writes_csv_starting_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let st = acmf()
        .args(["profile", "--epsilon", "0.05", "--weight-c", "1", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tau,h,h_prime");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 0.0);
    assert!(first[2] > 0.0);
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((last[1] - 1.0).abs() < 1e-6, "h(T) = {}", last[1]);
}

#[test]
fn unknown_flag_exits_with_usage_error() {
    let out = acmf()
        .args(["profile", "--epsilon", "0.1", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
}

#[test]
fn invalid_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, TINY.replace("[0.1, 0.08]", "[0.01]")).unwrap();
    let out = acmf()
        .args(["sweep", "--config"])
        .arg(&p)
        .env("ACMF_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("tiny").exists());
}

#[test]
fn sweep_writes_one_directory_per_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny(dir.path());
    let out = acmf()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .env("ACMF_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let root = dir.path().join("tiny");
    let members: Vec<_> = std::fs::read_dir(&root)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .collect();
    assert_eq!(members.len(), 2);
    for m in &members {
        for f in ["diagnostics.csv", "profile.csv", "summary.toml"] {
            assert!(m.path().join(f).is_file(), "{} missing {f}", m.path().display());
        }
    }
    assert!(root.join("verdicts.csv").is_file());
    assert!(root.join("config.toml").is_file());
}

#[test]
fn evolve_runs_a_single_member() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny(dir.path());
    let out = acmf()
        .args(["evolve", "--epsilon", "0.08", "--config"])
        .arg(&cfg)
        .env("ACMF_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let n = std::fs::read_dir(dir.path().join("tiny"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().is_dir())
        .count();
    assert_eq!(n, 1);

    let out = acmf()
        .args(["evolve", "--epsilon", "0.3", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
