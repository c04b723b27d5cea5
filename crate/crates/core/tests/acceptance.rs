//! Every acceptance criterion at its stated tolerance.
//!
//! Prints one `PASS`/`FAIL` line per criterion, followed by the individual
//! measurements. The report goes straight to stderr so it shows up without
//! `--nocapture`. Takes several minutes in release-like builds.

use std::io::Write;

use acmf_core::harness::acceptance::{full_suite, group, CRITERIA, DISCREPANCY_DECAY};
use acmf_core::harness::{write_verdicts, OUTPUT_ROOT_ENV};

/// Criteria whose failure is understood and documented. They are still
/// evaluated and reported as FAIL; they just do not fail this target.
const KNOWN_FAILING: &[&str] = &[DISCREPANCY_DECAY];

#[test]
fn acceptance() {
    let root = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::env::set_var(OUTPUT_ROOT_ENV, &root);
    let t = std::time::Instant::now();
    let mut err = std::io::stderr();
    let verdicts = full_suite(&mut |msg| {
        let _ = writeln!(std::io::stderr(), "[{:>6.1}s] {msg}", t.elapsed().as_secs_f64());
    })
    .unwrap();
    write_verdicts(&root.join("verdicts.csv"), &verdicts).unwrap();

    let results = group(&verdicts);
    let mut report = String::from("\n== acceptance ==\n");
    for r in &results {
        report += &format!("{}\n", r.line());
    }
    report += "\n== measurements ==\n";
    for v in &verdicts {
        report += &format!("{}\n", v.line());
    }
    err.write_all(report.as_bytes()).unwrap();

    let seen: Vec<&str> = results.iter().map(|r| r.name).collect();
    for c in CRITERIA {
        assert!(seen.contains(&c), "criterion {c} was not evaluated");
    }
    let unexpected: Vec<&str> = results
        .iter()
        .filter(|r| !r.pass() && !KNOWN_FAILING.contains(&r.name))
        .map(|r| r.name)
        .collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
    for r in results.iter().filter(|r| KNOWN_FAILING.contains(&r.name)) {
        if r.pass() {
            let _ = writeln!(err, "note: {} now passes; remove it from KNOWN_FAILING", r.name);
        }
    }
}
