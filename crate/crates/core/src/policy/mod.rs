//! Arm-selection policies and their transcripts.
//!
//! | id | policy |
//! |----|--------|
//! | `dp-bai` | Max-Det phased elimination with Laplace noise |
//! | `dp-bai-gauss` | same control flow with Gaussian noise |
//! | `baseline` | DP-BAI without Max-Det: every active arm is pulled |
//! | `od-linbai` | non-private G-optimal-design elimination with OLS |
//! | `dp-od` | OD-LinBAI with Laplace noise on the OLS moment vector |
//! | `dp-bai-noiseless` | DP-BAI with noise switched off (not private) |
//! | `es:<inner>:<n>:<iota>` | early-stopped `inner`: once arm `iota` has `n` pulls, pull the auxiliary arm 0 |

mod elimination;
mod optimal_design;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bandit::{Bandit, EarlyStop, RewardSource, SampledRewards};
use crate::model::{Instance, Privacy};
use crate::privacy::{Mechanism, NoiseSpec};
use crate::rng::{TrialStreams, UniformStream};
use crate::schedule::BranchRule;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    DpBai,
    DpBaiGauss,
    Baseline,
    OdLinBai,
    DpOd,
    NoiselessDpBai,
    /// `arm` is 0-based here; the string id uses the 1-based label.
    EarlyStopped { inner: Box<PolicyKind>, pulls: usize, arm: usize },
}

impl PolicyKind {
    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn is_private(&self) -> bool {
        match self {
            Self::DpBai | Self::DpBaiGauss | Self::Baseline | Self::DpOd => true,
            Self::OdLinBai | Self::NoiselessDpBai => false,
            Self::EarlyStopped { inner, .. } => inner.is_private(),
        }
    }

    /// Checks parameters against an instance with `arms` arms.
    pub fn validate(&self, arms: usize, privacy: Privacy) -> Result<()> {
        match self {
            Self::DpBaiGauss if !(privacy.delta > 0.0 && privacy.delta < 1.0) => {
                Err(Error::GaussianDelta(privacy.delta))
            }
            Self::EarlyStopped { inner, pulls, arm } => {
                if matches!(**inner, Self::EarlyStopped { .. }) {
                    return Err(Error::InvalidEarlyStop("nested early stopping is not supported"));
                }
                if *pulls == 0 {
                    return Err(Error::InvalidEarlyStop("n must be at least 1"));
                }
                if *arm >= arms {
                    return Err(Error::InvalidEarlyStop("iota must be an arm of the instance"));
                }
                inner.validate(arms, privacy)
            }
            _ => Ok(()),
        }
    }
}

/// `ES(π, n, ι)` with a 0-based `iota`.
pub fn es_wrap(policy: PolicyKind, pulls: usize, iota: usize, arms: usize) -> Result<PolicyKind> {
    if pulls == 0 {
        return Err(Error::InvalidEarlyStop("n must be at least 1"));
    }
    if iota >= arms {
        return Err(Error::InvalidEarlyStop("iota must be an arm of the instance"));
    }
    if matches!(policy, PolicyKind::EarlyStopped { .. }) {
        return Err(Error::InvalidEarlyStop("nested early stopping is not supported"));
    }
    Ok(PolicyKind::EarlyStopped { inner: Box::new(policy), pulls, arm: iota })
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DpBai => f.write_str("dp-bai"),
            Self::DpBaiGauss => f.write_str("dp-bai-gauss"),
            Self::Baseline => f.write_str("baseline"),
            Self::OdLinBai => f.write_str("od-linbai"),
            Self::DpOd => f.write_str("dp-od"),
            Self::NoiselessDpBai => f.write_str("dp-bai-noiseless"),
            Self::EarlyStopped { inner, pulls, arm } => write!(f, "es:{inner}:{pulls}:{}", arm + 1),
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        let unknown = || Error::UnknownPolicy(id.to_string());
        Ok(match id {
            "dp-bai" => Self::DpBai,
            "dp-bai-gauss" => Self::DpBaiGauss,
            "baseline" => Self::Baseline,
            "od-linbai" => Self::OdLinBai,
            "dp-od" => Self::DpOd,
            "dp-bai-noiseless" => Self::NoiselessDpBai,
            _ => {
                let rest = id.strip_prefix("es:").ok_or_else(unknown)?;
                let mut parts = rest.rsplitn(3, ':');
                let iota: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
                let pulls: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
                let inner: PolicyKind = parts.next().ok_or_else(unknown)?.parse()?;
                if iota == 0 {
                    return Err(Error::InvalidEarlyStop("iota is a 1-based arm label"));
                }
                if pulls == 0 {
                    return Err(Error::InvalidEarlyStop("n must be at least 1"));
                }
                if matches!(inner, Self::EarlyStopped { .. }) {
                    return Err(Error::InvalidEarlyStop("nested early stopping is not supported"));
                }
                Self::EarlyStopped { inner: Box::new(inner), pulls, arm: iota - 1 }
            }
        })
    }
}

/// How a phase chose which arms to pull.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Pulled the Max-Det collection and reconstructed the rest.
    MaxDet,
    /// Pulled every active arm equally often.
    Uniform,
    /// Pulled according to a G-optimal design and estimated by least squares.
    Design,
}

/// What happened in one phase. Per-arm vectors are aligned with `active`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRecord {
    pub phase: usize,
    /// Active arms (0-based, ascending).
    pub active: Vec<usize>,
    pub branch: Branch,
    /// Dimension of the span of the active vectors.
    pub dim: usize,
    /// Active arms pulled this phase: the Max-Det collection or the design
    /// support (0-based, ascending).
    pub sampled: Vec<usize>,
    pub pulls: Vec<usize>,
    /// Reduced feature vectors of the active arms.
    pub reduced: Vec<Vec<f64>>,
    /// Max-Det coordinates of every active arm (empty for other branches).
    pub coefficients: Vec<Vec<f64>>,
    /// Private (or, for non-private policies, plain) mean estimates.
    pub estimates: Vec<f64>,
    /// Every noise draw of the phase, in draw order.
    pub noise: Vec<NoiseSpec>,
    /// Arms kept for the next phase (0-based, ascending).
    pub survivors: Vec<usize>,
}

/// `(A_1, …, A_T, Î_T)` plus the rewards seen and a per-phase log.
///
/// Actions and the recommendation are labels: `1..=K` for real arms and `0`
/// for the auxiliary arm.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub actions: Vec<u32>,
    pub rewards: Vec<f64>,
    pub recommendation: u32,
    pub phases: Vec<PhaseRecord>,
}

impl Transcript {
    /// Pull counts indexed by label (`0` is the auxiliary arm).
    pub fn counts(&self, arms: usize) -> Vec<usize> {
        let mut c = alloc::vec![0; arms + 1];
        for &a in &self.actions {
            c[a as usize] += 1;
        }
        c
    }

    /// 0-based recommended arm, or `None` for the auxiliary arm.
    pub fn recommended_arm(&self) -> Option<usize> {
        (self.recommendation as usize).checked_sub(1)
    }

    /// Same actions and recommendation (ignores the phase log).
    pub fn same_output(&self, other: &Self) -> bool {
        self.actions == other.actions && self.recommendation == other.recommendation
    }
}

pub(crate) fn noise_spec(mechanism: Mechanism, privacy: Privacy, pulls: usize) -> Result<NoiseSpec> {
    match mechanism {
        Mechanism::Laplace => NoiseSpec::laplace(privacy.epsilon, pulls),
        Mechanism::Gaussian => NoiseSpec::gaussian(privacy.epsilon, privacy.delta, pulls),
        Mechanism::Disabled => Ok(NoiseSpec::disabled(pulls)),
    }
}

/// Runs a policy against any reward source. `features` are the arm vectors
/// known to the learner; `noise` feeds the privacy mechanisms.
pub fn run_on<S: RewardSource>(
    kind: &PolicyKind,
    features: &[Vec<f64>],
    privacy: Privacy,
    bandit: Bandit<S>,
    noise: &mut UniformStream,
) -> Result<Transcript> {
    kind.validate(features.len(), privacy)?;
    match kind {
        PolicyKind::DpBai => {
            elimination::run(features, privacy, Mechanism::Laplace, BranchRule::MaxDetWhenSparse, bandit, noise)
        }
        PolicyKind::DpBaiGauss => {
            elimination::run(features, privacy, Mechanism::Gaussian, BranchRule::MaxDetWhenSparse, bandit, noise)
        }
        PolicyKind::Baseline => {
            elimination::run(features, privacy, Mechanism::Laplace, BranchRule::AlwaysUniform, bandit, noise)
        }
        PolicyKind::NoiselessDpBai => {
            elimination::run(features, privacy, Mechanism::Disabled, BranchRule::MaxDetWhenSparse, bandit, noise)
        }
        PolicyKind::OdLinBai => optimal_design::run(features, privacy, false, bandit, noise),
        PolicyKind::DpOd => optimal_design::run(features, privacy, true, bandit, noise),
        PolicyKind::EarlyStopped { inner, pulls, arm } => {
            let bandit = bandit.with_early_stop(EarlyStop { arm: *arm, pulls: *pulls });
            run_on(inner, features, privacy, bandit, noise)
        }
    }
}

/// Runs a policy on an instance with rewards and noise from `trial`.
pub fn run(kind: &PolicyKind, instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    let bandit = Bandit::new(SampledRewards::new(instance, trial), budget);
    let mut noise = trial.noise();
    run_on(kind, instance.features(), instance.privacy(), bandit, &mut noise)
}

pub fn run_dp_bai(instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    run(&PolicyKind::DpBai, instance, budget, trial)
}

pub fn run_dp_bai_gauss(instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    run(&PolicyKind::DpBaiGauss, instance, budget, trial)
}

pub fn run_baseline(instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    run(&PolicyKind::Baseline, instance, budget, trial)
}

pub fn run_od_linbai(instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    run(&PolicyKind::OdLinBai, instance, budget, trial)
}

pub fn run_dp_od(instance: &Instance, budget: usize, trial: &TrialStreams) -> Result<Transcript> {
    run(&PolicyKind::DpOd, instance, budget, trial)
}

/// Smallest budget a policy accepts on an instance shape.
pub fn minimum_budget(kind: &PolicyKind, features: &[Vec<f64>]) -> Result<usize> {
    let k = features.len();
    let d = features.first().map_or(0, Vec::len);
    match kind {
        PolicyKind::DpBai | PolicyKind::DpBaiGauss | PolicyKind::NoiselessDpBai => {
            crate::schedule::minimum_budget(k, d, BranchRule::MaxDetWhenSparse)
        }
        PolicyKind::Baseline => crate::schedule::minimum_budget(k, d, BranchRule::AlwaysUniform),
        PolicyKind::OdLinBai | PolicyKind::DpOd => Ok(optimal_design::minimum_budget(features)),
        PolicyKind::EarlyStopped { inner, .. } => minimum_budget(inner, features),
    }
}

/// Top `keep` positions by estimate (descending), ties to the lower arm
/// index; returned as arm indices in ascending order.
pub(crate) fn top_arms(active: &[usize], estimates: &[f64], keep: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| estimates[b].total_cmp(&estimates[a]).then(active[a].cmp(&active[b])));
    let mut kept: Vec<usize> = order[..keep].iter().map(|&slot| active[slot]).collect();
    kept.sort_unstable();
    kept
}
