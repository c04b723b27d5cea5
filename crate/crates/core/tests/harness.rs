use acmf_core::harness::{experiment_verdicts, run_experiment, ExperimentConfig, Outcome, OUTPUT_ROOT_ENV};

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
t_end = 0.01
sample_interval = 0.001

[kernel]
pole_angle = 0.0
t0 = 0.001
s = 0.004

[windows]
disc_radius = 0.2
disc_time = [0.002, 0.008]
density_r_max = 0.2
bv_time = [0.002, 0.008]
bump_radius = 0.15

[output]
dir = "unused"
"#;

fn tiny(dir: &std::path::Path, name: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(TINY).unwrap();
    cfg.name = name.into();
    cfg.output.dir = dir.join(name);
    cfg
}

#[test]
fn reruns_are_bit_identical() {
    std::env::remove_var(OUTPUT_ROOT_ENV);
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&tiny(dir.path(), "a")).unwrap();
    let b = run_experiment(&tiny(dir.path(), "b")).unwrap();
    for (ma, mb) in a.members.iter().zip(&b.members) {
        let da = std::fs::read(ma.dir.join("diagnostics.csv")).unwrap();
        let db = std::fs::read(mb.dir.join("diagnostics.csv")).unwrap();
        assert!(!da.is_empty());
        assert_eq!(da, db, "eps {}", ma.epsilon);
    }
}

#[test]
fn small_run_produces_every_diagnostic() {
    std::env::remove_var(OUTPUT_ROOT_ENV);
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&tiny(dir.path(), "plumbing")).unwrap();
    assert_eq!(r.members.len(), 2);
    for m in &r.members {
        assert!(m.records.len() >= 10);
        assert!(m.worst_energy_increase <= 1e-12);
        assert!(m.z_grad_max.is_some_and(f64::is_finite));
        assert!(m.disc_sup.is_finite());
        assert!(m.density_max > 0.0);
        assert!(m.max_excess <= 1e-12);
    }
    let v = experiment_verdicts(&r);
    assert!(v.iter().any(|v| v.name.starts_with("energy-dissipation")));
    // not the canonical sweep: decay is recorded, never judged
    for d in v.iter().filter(|v| v.name.starts_with("discrepancy-decay")) {
        assert_eq!(d.outcome, Outcome::Recorded);
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 6);
}
