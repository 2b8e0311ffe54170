//! Seeded parallel trials over a `(policy × T × ε)` grid.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use dpbai_core::policy::{self, PolicyKind};
use dpbai_core::{Instance, Privacy, TrialStreams};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::summary::{summarize_records, write_summary, SummaryRow};
use crate::{Result, SimError};

pub const HEADER: [&str; 8] = ["policy", "T", "epsilon", "delta", "trial", "recommended", "success", "wall_ms"];

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Recommended label (`0` is the auxiliary arm) and whether it is the
    /// best arm.
    Done { recommended: u32, success: bool },
    /// The policy rejected the run, e.g. an infeasible budget. Recorded once
    /// per grid point with no trial index.
    Skipped,
    /// The run failed part way.
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub policy: String,
    pub budget: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trial: Option<u64>,
    pub outcome: Outcome,
    pub wall_ms: f64,
}

impl TrialRecord {
    pub fn fields(&self) -> [String; 8] {
        let (rec, success) = match self.outcome {
            Outcome::Done { recommended, success } => (recommended.to_string(), success.to_string()),
            Outcome::Skipped => (String::new(), "skipped".into()),
            Outcome::Failed => (String::new(), "error".into()),
        };
        [
            self.policy.clone(),
            self.budget.to_string(),
            self.epsilon.to_string(),
            self.delta.to_string(),
            self.trial.map(|t| t.to_string()).unwrap_or_default(),
            rec,
            success,
            format!("{:.3}", self.wall_ms),
        ]
    }
}

/// Key shared by every policy at a grid point, so policies see the same
/// rewards (common random numbers).
pub fn grid_key(budget: usize, epsilon: f64) -> u64 {
    ((budget as u64) << 32) | u64::from((epsilon as f32).to_bits())
}

pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Runs one grid point.
pub fn run_point(
    instance: &Instance,
    kind: &PolicyKind,
    budget: usize,
    trials: u64,
    master_seed: u64,
    timing: bool,
) -> Vec<TrialRecord> {
    let privacy = instance.privacy();
    let base = TrialRecord {
        policy: kind.id(),
        budget,
        epsilon: privacy.epsilon,
        delta: privacy.delta,
        trial: None,
        outcome: Outcome::Skipped,
        wall_ms: 0.0,
    };
    let feasible = kind.validate(instance.arms(), privacy).is_ok()
        && policy::minimum_budget(kind, instance.features()).is_ok_and(|m| m <= budget);
    if !feasible {
        return vec![base];
    }
    let key = grid_key(budget, privacy.epsilon);
    let best = instance.best_arm() as u32 + 1;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let streams = TrialStreams::new(master_seed, key, trial);
            let start = Instant::now();
            let outcome = match policy::run(kind, instance, budget, &streams) {
                Ok(tr) => Outcome::Done { recommended: tr.recommendation, success: tr.recommendation == best },
                Err(_) => Outcome::Failed,
            };
            let wall_ms = if timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            TrialRecord { trial: Some(trial), outcome, wall_ms, ..base.clone() }
        })
        .collect()
}

/// Runs the whole grid on `threads` workers and writes the per-trial CSV and
/// the summary CSV. Output does not depend on `threads`.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    config.validate()?;
    let kinds = config.parsed_policies()?;
    let base = config.instance.build_default()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    let mut records = Vec::new();
    pool.install(|| -> Result<()> {
        for kind in &kinds {
            for &budget in &config.t_grid {
                for &eps in &config.epsilon_grid {
                    let instance = base.with_privacy(Privacy::new(eps, config.delta)?);
                    records.extend(run_point(&instance, kind, budget, config.trials, config.master_seed, config.timing));
                }
            }
        }
        Ok(())
    })?;
    write_records(&config.output_path, &records)?;
    let summary = summarize_records(&records);
    write_summary(&config.summary_path(), &summary)?;
    Ok(ExperimentOutput { records, summary })
}

pub(crate) fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| SimError::Io { path: dir.into(), source })?;
    }
    File::create(path).map_err(|source| SimError::Io { path: path.into(), source })
}

pub fn write_records(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|source| SimError::Io { path: path.into(), source })?;
    w.into_inner().map_err(|e| SimError::Io { path: path.into(), source: e.into_error() })?.flush().ok();
    Ok(())
}
