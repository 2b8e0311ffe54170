//! Empirical privacy auditing on neighbouring reward tables.
//!
//! For an output event `S` the policy runs `trials` times on each table with
//! fresh noise, giving `p̂ = P̂(S | table)` and `p̂' = P̂(S | neighbour)`. The
//! estimate is `|ln(p̂/p̂')|`; the lower bound replaces the two rates by the
//! ends of their Wilson intervals (less `δ` on the numerator), so a lower
//! bound above `ε` is a confident violation. Checking a handful of events
//! only bounds the true privacy loss from below.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dpbai_core::bandit::{Bandit, RewardTable, TableRewards};
use dpbai_core::policy::{self, PolicyKind, Transcript};
use dpbai_core::{Instance, Privacy, TrialStreams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::InstanceSpec;
use crate::experiment::create;
use crate::summary::wilson;
use crate::{read_json, Result, SimError};

pub const MIN_TRIALS: u64 = 10_000;

/// Measurable output events over `[K]^{T+1}`. Arm labels are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// `Î_T = label`.
    Recommended(u32),
    /// The survivors of `phase` are exactly `arms`.
    Survivors { phase: usize, arms: Vec<u32> },
}

impl Event {
    pub fn holds(&self, tr: &Transcript) -> bool {
        match self {
            Self::Recommended(label) => tr.recommendation == *label,
            Self::Survivors { phase, arms } => tr.phases.get(phase - 1).is_some_and(|p| {
                p.survivors.len() == arms.len() && p.survivors.iter().zip(arms).all(|(&a, &l)| a as u32 + 1 == l)
            }),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Recommended(l) => write!(f, "recommended:{l}"),
            Self::Survivors { phase, arms } => {
                let list: Vec<String> = arms.iter().map(u32::to_string).collect();
                write!(f, "survivors:{phase}:{}", list.join(","))
            }
        }
    }
}

impl FromStr for Event {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || SimError::Config(format!("unknown event {s:?}"));
        let mut parts = s.split(':');
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("recommended"), Some(l), None, None) => Ok(Self::Recommended(l.parse().map_err(|_| bad())?)),
            (Some("survivors"), Some(p), Some(list), None) => {
                let phase: usize = p.parse().map_err(|_| bad())?;
                let mut arms = list.split(',').map(|a| a.parse::<u32>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
                arms.sort_unstable();
                if phase == 0 || arms.contains(&0) {
                    return Err(bad());
                }
                Ok(Self::Survivors { phase, arms })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub event: Event,
    pub p_hat: f64,
    pub p_hat_neighbour: f64,
    pub epsilon_hat: f64,
    pub lower_bound: f64,
    /// `epsilon_hat − lower_bound`.
    pub confidence_slack: f64,
    pub trials_per_table: u64,
    pub epsilon: f64,
}

impl AuditReport {
    pub fn violation(&self) -> bool {
        self.lower_bound > self.epsilon
    }
}

/// Events counted on each table, in `events` order.
#[allow(clippy::too_many_arguments)]
fn count_events(
    kind: &PolicyKind,
    features: &[Vec<f64>],
    privacy: Privacy,
    table: &RewardTable,
    budget: usize,
    events: &[Event],
    trials: u64,
    seed: u64,
    table_id: u64,
) -> Result<Vec<u64>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut noise = TrialStreams::new(seed, table_id, trial).noise();
            let bandit = Bandit::new(TableRewards::new(table), budget);
            let tr = policy::run_on(kind, features, privacy, bandit, &mut noise)?;
            Ok(events.iter().map(|e| u64::from(e.holds(&tr))).collect::<Vec<u64>>())
        })
        .try_reduce(
            || vec![0; events.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

fn log_ratio(a: f64, b: f64) -> f64 {
    match (a > 0.0, b > 0.0) {
        (true, true) => (a / b).ln(),
        (false, false) => 0.0,
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
    }
}

/// Audits `kind` on a pair of neighbouring tables.
#[allow(clippy::too_many_arguments)]
pub fn audit_dp(
    kind: &PolicyKind,
    features: &[Vec<f64>],
    privacy: Privacy,
    tables: (&RewardTable, &RewardTable),
    budget: usize,
    events: &[Event],
    trials: u64,
    seed: u64,
    z: f64,
) -> Result<Vec<AuditReport>> {
    if !tables.0.is_neighbour(tables.1) {
        return Err(SimError::Config("audit tables must differ in exactly one cell".into()));
    }
    if trials < MIN_TRIALS {
        return Err(SimError::Config(format!("audits need at least {MIN_TRIALS} trials per table")));
    }
    if tables.0.horizon() < budget {
        return Err(SimError::Config(format!("tables hold {} pulls per arm, budget is {budget}", tables.0.horizon())));
    }
    let a = count_events(kind, features, privacy, tables.0, budget, events, trials, seed, 0)?;
    let b = count_events(kind, features, privacy, tables.1, budget, events, trials, seed, 1)?;
    let n = trials as f64;
    Ok(events
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(event, (&ca, &cb))| {
            let (pa, pb) = (ca as f64 / n, cb as f64 / n);
            let (lo_a, hi_a) = wilson(ca, trials, z);
            let (lo_b, hi_b) = wilson(cb, trials, z);
            let epsilon_hat = log_ratio(pa, pb).abs();
            let lower_bound = log_ratio(lo_a - privacy.delta, hi_b)
                .max(log_ratio(lo_b - privacy.delta, hi_a))
                .max(0.0);
            AuditReport {
                event: event.clone(),
                p_hat: pa,
                p_hat_neighbour: pb,
                epsilon_hat,
                lower_bound,
                confidence_slack: epsilon_hat - lower_bound,
                trials_per_table: trials,
                epsilon: privacy.epsilon,
            }
        })
        .collect())
}

/// A single changed cell; `arm` and `pull` are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellChange {
    pub arm: usize,
    pub pull: usize,
    /// New value; defaults to `1 − old`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableSource {
    /// Sampled from the instance's reward laws.
    Sampled { seed: u64 },
    /// One row of `budget` rewards per arm.
    Explicit { base: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub policy: String,
    pub instance: InstanceSpec,
    pub budget: usize,
    pub tables: TableSource,
    #[serde(default = "default_cell")]
    pub cell: CellChange,
    pub trials: u64,
    /// Defaults to `recommended:i` for every arm.
    #[serde(default)]
    pub events: Vec<String>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_z")]
    pub z: f64,
    #[serde(default = "default_audit_output")]
    pub output_path: PathBuf,
}

fn default_cell() -> CellChange {
    CellChange { arm: 1, pull: 1, value: None }
}

fn default_z() -> f64 {
    3.0
}

fn default_audit_output() -> PathBuf {
    PathBuf::from("audit.csv")
}

impl AuditSpec {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn table_pair(&self, instance: &Instance) -> Result<(RewardTable, RewardTable)> {
        let base = match &self.tables {
            TableSource::Sampled { seed } => RewardTable::sample(instance, self.budget, &TrialStreams::new(*seed, 0, 0)),
            TableSource::Explicit { base } => {
                if base.len() != instance.arms() || base.iter().any(|r| r.len() != self.budget) {
                    return Err(SimError::Config("explicit table must be K rows of `budget` rewards".into()));
                }
                RewardTable::new(instance.arms(), self.budget, base.concat())?
            }
        };
        let (arm, pull) = (self.cell.arm.wrapping_sub(1), self.cell.pull.wrapping_sub(1));
        if arm >= base.arms() || pull >= base.horizon() {
            return Err(SimError::Config("cell lies outside the table".into()));
        }
        let value = self.cell.value.unwrap_or(1.0 - base.get(arm, pull));
        let other = base.with_cell(arm, pull, value)?;
        Ok((base, other))
    }

    pub fn parsed_events(&self, arms: usize) -> Result<Vec<Event>> {
        if self.events.is_empty() {
            return Ok((1..=arms as u32).map(Event::Recommended).collect());
        }
        self.events.iter().map(|e| e.parse()).collect()
    }

    pub fn run(&self) -> Result<Vec<AuditReport>> {
        let kind: PolicyKind = self.policy.parse()?;
        let instance = self.instance.build_default()?;
        let (a, b) = self.table_pair(&instance)?;
        let events = self.parsed_events(instance.arms())?;
        audit_dp(
            &kind,
            instance.features(),
            instance.privacy(),
            (&a, &b),
            self.budget,
            &events,
            self.trials,
            self.master_seed,
            self.z,
        )
    }
}

pub const AUDIT_HEADER: [&str; 9] = [
    "event",
    "p_hat",
    "p_hat_neighbour",
    "epsilon_hat",
    "lower_bound",
    "confidence_slack",
    "trials_per_table",
    "epsilon",
    "violation",
];

pub fn write_audit(path: &Path, reports: &[AuditReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(AUDIT_HEADER)?;
    for r in reports {
        w.write_record([
            r.event.to_string(),
            r.p_hat.to_string(),
            r.p_hat_neighbour.to_string(),
            r.epsilon_hat.to_string(),
            r.lower_bound.to_string(),
            r.confidence_slack.to_string(),
            r.trials_per_table.to_string(),
            r.epsilon.to_string(),
            r.violation().to_string(),
        ])?;
    }
    w.flush().map_err(|source| SimError::Io { path: path.into(), source })?;
    Ok(())
}
