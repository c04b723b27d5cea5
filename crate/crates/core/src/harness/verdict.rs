use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Measured and reported without a pass/fail claim.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub outcome: Outcome,
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, measured: f64, threshold: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            measured,
            threshold,
            note: note.into(),
        }
    }

    pub fn recorded(name: impl Into<String>, measured: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            outcome: Outcome::Recorded,
            measured,
            threshold: f64::NAN,
            note: note.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    /// `PASS name: measured (threshold) note`.
    pub fn line(&self) -> String {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Recorded => "INFO",
        };
        format!(
            "{tag} {}: measured {:.6e}, threshold {:.6e}; {}",
            self.name, self.measured, self.threshold, self.note
        )
    }
}

pub const VERDICT_COLUMNS: [&str; 5] = ["name", "outcome", "measured", "threshold", "note"];

pub fn write_verdicts(path: &Path, verdicts: &[Verdict]) -> Result<()> {
    write_verdicts_to(std::fs::File::create(path)?, verdicts)
}

pub fn write_verdicts_to<W: Write>(out: W, verdicts: &[Verdict]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(VERDICT_COLUMNS)?;
    for v in verdicts {
        w.serialize(v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_verdicts(path: &Path) -> Result<Vec<Verdict>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let v = vec![
            Verdict::new("a", true, 1.0, 2.0, "x, y"),
            Verdict::recorded("b", 0.5, "control"),
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        write_verdicts(&p, &v).unwrap();
        let back = read_verdicts(&p).unwrap();
        assert_eq!(back[0], v[0]);
        assert_eq!(back[1].outcome, Outcome::Recorded);
        assert!(back[1].threshold.is_nan());
        assert!(v[0].line().starts_with("PASS a:"));
    }
}
