//! Success rates with Wilson intervals, from records or a results file.

use std::path::Path;

use crate::experiment::{create, Outcome, TrialRecord, HEADER};
use crate::{Result, SimError};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` at quantile `z`.
pub fn wilson(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub policy: String,
    pub budget: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub successes: u64,
    /// `None` when no trial completed.
    pub rate: Option<f64>,
    pub wilson: Option<(f64, f64)>,
    pub mean_wall_ms: Option<f64>,
    pub skipped: bool,
    pub failed: u64,
}

impl SummaryRow {
    pub fn flagged(&self) -> bool {
        self.rate.is_none()
    }
}

/// Groups records by grid point, in first-appearance order.
pub fn summarize_records(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut walls: Vec<f64> = Vec::new();
    for r in records {
        let pos = rows.iter().position(|s| {
            s.policy == r.policy && s.budget == r.budget && s.epsilon == r.epsilon && s.delta == r.delta
        });
        let i = pos.unwrap_or_else(|| {
            rows.push(SummaryRow {
                policy: r.policy.clone(),
                budget: r.budget,
                epsilon: r.epsilon,
                delta: r.delta,
                trials: 0,
                successes: 0,
                rate: None,
                wilson: None,
                mean_wall_ms: None,
                skipped: false,
                failed: 0,
            });
            walls.push(0.0);
            rows.len() - 1
        });
        let row = &mut rows[i];
        match r.outcome {
            Outcome::Done { success, .. } => {
                row.trials += 1;
                row.successes += u64::from(success);
                walls[i] += r.wall_ms;
            }
            Outcome::Skipped => row.skipped = true,
            Outcome::Failed => row.failed += 1,
        }
    }
    for (row, wall) in rows.iter_mut().zip(walls) {
        if row.trials > 0 {
            row.rate = Some(row.successes as f64 / row.trials as f64);
            row.wilson = Some(wilson(row.successes, row.trials, Z95));
            row.mean_wall_ms = Some(wall / row.trials as f64);
        }
    }
    rows
}

pub const SUMMARY_HEADER: [&str; 11] =
    ["policy", "T", "epsilon", "delta", "trials", "successes", "rate", "wilson_lo", "wilson_hi", "mean_wall_ms", "flag"];

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_default()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        let flag = if r.skipped {
            "skipped"
        } else if r.trials == 0 {
            "no-trials"
        } else if r.failed > 0 {
            "errors"
        } else {
            ""
        };
        w.write_record([
            r.policy.clone(),
            r.budget.to_string(),
            r.epsilon.to_string(),
            r.delta.to_string(),
            r.trials.to_string(),
            r.successes.to_string(),
            opt(r.rate, 6),
            opt(r.wilson.map(|w| w.0), 6),
            opt(r.wilson.map(|w| w.1), 6),
            opt(r.mean_wall_ms, 3),
            flag.to_string(),
        ])?;
    }
    w.flush().map_err(|source| SimError::Io { path: path.into(), source })?;
    Ok(())
}

fn parse_record(fields: &csv::StringRecord) -> std::result::Result<TrialRecord, String> {
    if fields.len() != HEADER.len() {
        return Err(format!("expected {} fields, found {}", HEADER.len(), fields.len()));
    }
    let num = |i: usize| -> std::result::Result<f64, String> {
        fields[i].parse::<f64>().map_err(|_| format!("{} is not a number: {:?}", HEADER[i], &fields[i]))
    };
    let budget = fields[1].parse::<usize>().map_err(|_| format!("T is not an integer: {:?}", &fields[1]))?;
    let trial = match &fields[4] {
        "" => None,
        s => Some(s.parse::<u64>().map_err(|_| format!("trial is not an integer: {s:?}"))?),
    };
    let outcome = match (&fields[5], &fields[6]) {
        ("", "skipped") => Outcome::Skipped,
        ("", "error") => Outcome::Failed,
        (rec, ok @ ("true" | "false")) => Outcome::Done {
            recommended: rec.parse().map_err(|_| format!("recommended is not an arm label: {rec:?}"))?,
            success: ok == "true",
        },
        (_, s) => return Err(format!("success must be true, false, skipped or error: {s:?}")),
    };
    if trial.is_none() && matches!(outcome, Outcome::Done { .. }) {
        return Err("completed trial without a trial index".into());
    }
    Ok(TrialRecord {
        policy: fields[0].to_string(),
        budget,
        epsilon: num(2)?,
        delta: num(3)?,
        trial,
        outcome,
        wall_ms: num(7)?,
    })
}

/// Reads a results file, reporting every malformed row with its line number.
pub fn read_results(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = std::fs::File::open(path).map_err(|source| SimError::Io { path: path.into(), source })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file);
    let mut records = Vec::new();
    let mut bad = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 1;
        match row {
            Err(e) => bad.push((line, e.to_string())),
            Ok(fields) if i == 0 => {
                if fields.iter().ne(HEADER) {
                    bad.push((line, format!("header must be {}", HEADER.join(","))));
                }
            }
            Ok(fields) => match parse_record(&fields) {
                Ok(r) => records.push(r),
                Err(why) => bad.push((line, why)),
            },
        }
    }
    if records.is_empty() && bad.is_empty() && reader.position().line() <= 1 {
        bad.push((1, "empty file".into()));
    }
    if bad.is_empty() {
        Ok(records)
    } else {
        Err(SimError::Malformed(bad))
    }
}

pub fn summarize(path: &Path) -> Result<Vec<SummaryRow>> {
    Ok(summarize_records(&read_results(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        let (lo, hi) = wilson(900, 1000, Z95);
        assert!((lo - 0.8798).abs() < 5e-4 && (hi - 0.9170).abs() < 5e-4, "{lo} {hi}");
        let (lo, hi) = wilson(1, 1, Z95);
        assert!(hi == 1.0 && lo < 0.25);
        assert_eq!(wilson(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn empty_grid_point_is_flagged() {
        let r = TrialRecord {
            policy: "dp-bai".into(),
            budget: 2,
            epsilon: 1.0,
            delta: 0.0,
            trial: None,
            outcome: Outcome::Skipped,
            wall_ms: 0.0,
        };
        let s = summarize_records(&[r]);
        assert!(s[0].flagged() && s[0].skipped);
    }
}
