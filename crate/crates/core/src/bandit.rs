//! Reward sources and the pull recorder policies interact with.

use alloc::vec::Vec;

use crate::model::{Instance, RewardLaw};
use crate::policy::{PhaseRecord, Transcript};
use crate::rng::{TrialStreams, UniformStream};
use crate::{Error, Result};

/// Supplies `X_{i,n}`, the reward of arm `i` on its `n`-th pull (0-based).
pub trait RewardSource {
    fn arms(&self) -> usize;
    fn reward(&mut self, arm: usize, pull: usize) -> f64;
}

/// Rewards drawn from an instance's laws, one counter-based stream per arm.
pub struct SampledRewards {
    laws: Vec<RewardLaw>,
    trial: TrialStreams,
    streams: Vec<Option<UniformStream>>,
    drawn: Vec<usize>,
}

impl SampledRewards {
    pub fn new(instance: &Instance, trial: &TrialStreams) -> Self {
        let k = instance.arms();
        Self {
            laws: instance.laws().to_vec(),
            trial: *trial,
            streams: (0..k).map(|_| None).collect(),
            drawn: alloc::vec![0; k],
        }
    }
}

impl RewardSource for SampledRewards {
    fn arms(&self) -> usize {
        self.laws.len()
    }

    fn reward(&mut self, arm: usize, pull: usize) -> f64 {
        let trial = &self.trial;
        let stream = self.streams[arm].get_or_insert_with(|| trial.arm(arm));
        // Skip ahead if a caller asks for a later pull; rewinding is not
        // supported since pulls of an arm always happen in order.
        debug_assert!(pull >= self.drawn[arm]);
        while self.drawn[arm] < pull {
            stream.next_uniform();
            self.drawn[arm] += 1;
        }
        self.drawn[arm] += 1;
        self.laws[arm].sample_with(stream.next_uniform())
    }
}

/// A fixed `K × T` reward table: entry `(i, n)` is the reward of arm `i` on
/// its `n`-th pull.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardTable {
    arms: usize,
    horizon: usize,
    cells: Vec<f64>,
}

impl RewardTable {
    pub fn new(arms: usize, horizon: usize, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != arms * horizon {
            return Err(Error::Table("cell count must equal arms × horizon"));
        }
        if cells.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Table("rewards must lie in [0, 1]"));
        }
        Ok(Self { arms, horizon, cells })
    }

    /// Table filled by sampling the instance's reward laws.
    pub fn sample(instance: &Instance, horizon: usize, trial: &TrialStreams) -> Self {
        let mut source = SampledRewards::new(instance, trial);
        let arms = instance.arms();
        let mut cells = Vec::with_capacity(arms * horizon);
        for arm in 0..arms {
            for n in 0..horizon {
                cells.push(source.reward(arm, n));
            }
        }
        Self { arms, horizon, cells }
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, arm: usize, pull: usize) -> f64 {
        self.cells[arm * self.horizon + pull]
    }

    /// Copy with one cell replaced.
    pub fn with_cell(&self, arm: usize, pull: usize, value: f64) -> Result<Self> {
        if arm >= self.arms || pull >= self.horizon {
            return Err(Error::Table("cell out of range"));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Table("rewards must lie in [0, 1]"));
        }
        let mut t = self.clone();
        t.cells[arm * self.horizon + pull] = value;
        Ok(t)
    }

    /// Cells `(arm, pull)` where the two tables differ.
    pub fn differing_cells(&self, other: &Self) -> Result<Vec<(usize, usize)>> {
        if self.arms != other.arms || self.horizon != other.horizon {
            return Err(Error::Table("tables have different shapes"));
        }
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| (i / self.horizon, i % self.horizon))
            .collect())
    }

    pub fn is_neighbour(&self, other: &Self) -> bool {
        matches!(self.differing_cells(other), Ok(cells) if cells.len() == 1)
    }
}

pub struct TableRewards<'a> {
    table: &'a RewardTable,
}

impl<'a> TableRewards<'a> {
    pub fn new(table: &'a RewardTable) -> Self {
        Self { table }
    }
}

impl RewardSource for TableRewards<'_> {
    fn arms(&self) -> usize {
        self.table.arms
    }

    fn reward(&mut self, arm: usize, pull: usize) -> f64 {
        self.table.get(arm, pull)
    }
}

/// Once `arm` has `pulls` pulls, every further pull goes to the auxiliary
/// zero-reward arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EarlyStop {
    pub arm: usize,
    pub pulls: usize,
}

/// Records actions and rewards and enforces the budget.
pub struct Bandit<S> {
    source: S,
    budget: usize,
    actions: Vec<u32>,
    rewards: Vec<f64>,
    counts: Vec<usize>,
    early_stop: Option<EarlyStop>,
    aux_pulls: usize,
}

impl<S: RewardSource> Bandit<S> {
    pub fn new(source: S, budget: usize) -> Self {
        let k = source.arms();
        Self {
            source,
            budget,
            actions: Vec::with_capacity(budget),
            rewards: Vec::with_capacity(budget),
            counts: alloc::vec![0; k],
            early_stop: None,
            aux_pulls: 0,
        }
    }

    pub fn with_early_stop(mut self, stop: EarlyStop) -> Self {
        self.early_stop = Some(stop);
        self
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.actions.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.actions.len()
    }

    /// Pull counts of the real arms.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn auxiliary_pulled(&self) -> bool {
        self.aux_pulls > 0
    }

    pub fn pull(&mut self, arm: usize) -> Result<f64> {
        if self.actions.len() >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        if arm >= self.counts.len() {
            return Err(Error::ArmOutOfRange { arm, arms: self.counts.len() });
        }
        if let Some(stop) = self.early_stop {
            if self.counts[stop.arm] >= stop.pulls {
                self.aux_pulls += 1;
                self.actions.push(0);
                self.rewards.push(0.0);
                return Ok(0.0);
            }
        }
        let x = self.source.reward(arm, self.counts[arm]);
        self.counts[arm] += 1;
        self.actions.push(arm as u32 + 1);
        self.rewards.push(x);
        Ok(x)
    }

    /// Pulls `arm` `n` times and returns the empirical mean of the rewards.
    pub fn pull_mean(&mut self, arm: usize, n: usize) -> Result<f64> {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += self.pull(arm)?;
        }
        Ok(sum / n as f64)
    }

    /// Pulls `arm` `n` times and returns the reward sum.
    pub fn pull_sum(&mut self, arm: usize, n: usize) -> Result<f64> {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += self.pull(arm)?;
        }
        Ok(sum)
    }

    /// Spends the rest of the budget on `arm`.
    pub fn exhaust(&mut self, arm: usize) -> Result<()> {
        while self.remaining() > 0 {
            self.pull(arm)?;
        }
        Ok(())
    }

    /// Closes the run. The recommendation becomes the auxiliary arm if it
    /// was ever pulled.
    pub fn finish(self, recommended: usize, phases: Vec<PhaseRecord>) -> Transcript {
        let recommendation = if self.aux_pulls > 0 { 0 } else { recommended as u32 + 1 };
        Transcript { actions: self.actions, rewards: self.rewards, recommendation, phases }
    }
}
