//! Problem instances, reward laws, gaps and hardness.

use alloc::vec::Vec;

use crate::num::{dot, exp, sqrt};
use crate::rng::UniformStream;
use crate::{Error, Result};

/// Tolerance used when checking a reward law's mean against `a_i · θ*`.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Reward distribution of a single arm. All laws are supported on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RewardLaw {
    Bernoulli { mean: f64 },
    /// Uniform on `[0, 2μ]`; needs `μ <= 1/2`.
    UniformZeroToTwoMu { mean: f64 },
    PointMass { value: f64 },
}

impl RewardLaw {
    pub fn bernoulli(mean: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidRewardLaw("Bernoulli mean must lie in [0, 1]"));
        }
        Ok(Self::Bernoulli { mean })
    }

    pub fn uniform(mean: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&mean) {
            return Err(Error::InvalidRewardLaw("uniform-on-[0, 2μ] needs μ in [0, 1/2]"));
        }
        Ok(Self::UniformZeroToTwoMu { mean })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidRewardLaw("point mass must lie in [0, 1]"));
        }
        Ok(Self::PointMass { value })
    }

    /// Law of the same family with a different mean.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        match self {
            Self::Bernoulli { .. } => Self::bernoulli(mean),
            Self::UniformZeroToTwoMu { .. } => Self::uniform(mean),
            Self::PointMass { .. } => Self::point_mass(mean),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { mean } | Self::UniformZeroToTwoMu { mean } => mean,
            Self::PointMass { value } => value,
        }
    }

    fn validate(&self) -> Result<()> {
        self.with_mean(self.mean()).map(|_| ())
    }

    /// Maps one uniform variate on (0, 1) to a reward.
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        match *self {
            Self::Bernoulli { mean } => {
                if u < mean {
                    1.0
                } else {
                    0.0
                }
            }
            Self::UniformZeroToTwoMu { mean } => 2.0 * mean * u,
            Self::PointMass { value } => value,
        }
    }

    /// Analytic CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Bernoulli { mean } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - mean
                } else {
                    1.0
                }
            }
            Self::UniformZeroToTwoMu { mean } => {
                if mean == 0.0 {
                    if x < 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    (x / (2.0 * mean)).clamp(0.0, 1.0)
                }
            }
            Self::PointMass { value } => {
                if x < value {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Privacy parameters `(ε, δ)`; `δ = 0` means pure ε-DP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Privacy {
    pub epsilon: f64,
    pub delta: f64,
}

impl Privacy {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

/// A linear bandit instance: features `a_i`, parameter `θ*`, reward laws
/// with means `a_i · θ*`, and the privacy level.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    features: Vec<Vec<f64>>,
    theta: Vec<f64>,
    laws: Vec<RewardLaw>,
    privacy: Privacy,
    means: Vec<f64>,
    best: usize,
}

impl Instance {
    pub fn new(
        features: Vec<Vec<f64>>,
        theta: Vec<f64>,
        laws: Vec<RewardLaw>,
        privacy: Privacy,
    ) -> Result<Self> {
        let arms = features.len();
        if arms < 2 {
            return Err(Error::TooFewArms(arms));
        }
        let dim = theta.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (arm, a) in features.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch { arm, expected: dim, got: a.len() });
            }
        }
        if laws.len() != arms {
            return Err(Error::LawCount { expected: arms, got: laws.len() });
        }
        let means: Vec<f64> = features.iter().map(|a| dot(a, &theta)).collect();
        for (arm, (law, &mean)) in laws.iter().zip(&means).enumerate() {
            law.validate()?;
            if !(0.0..=1.0).contains(&mean) {
                return Err(Error::MeanOutOfRange { arm, mean });
            }
            if (law.mean() - mean).abs() > MEAN_TOLERANCE {
                return Err(Error::MeanMismatch { arm, law_mean: law.mean(), linear_mean: mean });
            }
        }
        let best = argmax_first(&means);
        if let Some(other) = (0..arms).find(|&i| i != best && means[i] == means[best]) {
            return Err(Error::NonUniqueBest { first: best, second: other });
        }
        Ok(Self { features, theta, laws, privacy, means, best })
    }

    /// Builds an instance whose reward laws all belong to one family, with
    /// means taken from `a_i · θ*`.
    pub fn with_family(
        features: Vec<Vec<f64>>,
        theta: Vec<f64>,
        family: RewardLaw,
        privacy: Privacy,
    ) -> Result<Self> {
        let laws = features
            .iter()
            .map(|a| {
                if a.len() != theta.len() {
                    return Ok(family);
                }
                family.with_mean(dot(a, &theta))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(features, theta, laws, privacy)
    }

    /// The 30-arm, 2-dimensional synthetic instance: `θ* = [0.045, 0.5]`,
    /// `a_1 = [0, 1]`, `a_2 = [0, 0.9]`, `a_3 = [10, 0]`, and
    /// `a_i = [1, ω_i]` with `ω_i ~ U[0, 0.8]` drawn from `omega_seed`.
    /// Rewards are uniform on `[0, 2μ_i]`.
    pub fn synthetic_30(omega_seed: u64, privacy: Privacy) -> Result<Self> {
        let mut stream = UniformStream::from_seed_u64(omega_seed);
        let mut features = Vec::with_capacity(30);
        features.push(alloc::vec![0.0, 1.0]);
        features.push(alloc::vec![0.0, 0.9]);
        features.push(alloc::vec![10.0, 0.0]);
        for _ in 3..30 {
            features.push(alloc::vec![1.0, 0.8 * stream.next_uniform()]);
        }
        let theta = alloc::vec![0.045, 0.5];
        Self::with_family(features, theta, RewardLaw::UniformZeroToTwoMu { mean: 0.0 }, privacy)
    }

    /// Two arms `a_1 = [x, 0]`, `a_2 = [0, y]` with means `1/2` and
    /// `1/2 - gap`, uniform rewards on `[0, 2μ]`.
    pub fn two_armed(x: f64, y: f64, gap: f64, privacy: Privacy) -> Result<Self> {
        let mu = [0.5, 0.5 - gap];
        let features = alloc::vec![alloc::vec![x, 0.0], alloc::vec![0.0, y]];
        let theta = alloc::vec![mu[0] / x, mu[1] / y];
        let laws = alloc::vec![RewardLaw::uniform(mu[0])?, RewardLaw::uniform(mu[1])?];
        Self::new(features, theta, laws, privacy)
    }

    /// Standard-basis instance: `a_i = e_i`, `θ* = means`, one law family.
    pub fn orthogonal(means: &[f64], family: RewardLaw, privacy: Privacy) -> Result<Self> {
        let k = means.len();
        let features = (0..k)
            .map(|i| {
                let mut e = alloc::vec![0.0; k];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::with_family(features, means.to_vec(), family, privacy)
    }

    pub fn arms(&self) -> usize {
        self.features.len()
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn laws(&self) -> &[RewardLaw] {
        &self.laws
    }

    pub fn privacy(&self) -> Privacy {
        self.privacy
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// 0-based index of the unique best arm.
    pub fn best_arm(&self) -> usize {
        self.best
    }

    /// Same arms and laws under a different privacy level.
    pub fn with_privacy(&self, privacy: Privacy) -> Self {
        Self { privacy, ..self.clone() }
    }

    /// `a_arm · θ*`.
    pub fn mean_reward(&self, arm: usize) -> Result<f64> {
        self.check_arm(arm)?;
        Ok(self.means[arm])
    }

    /// One reward draw for `arm`; consumes exactly one uniform variate.
    pub fn sample_reward(&self, arm: usize, stream: &mut UniformStream) -> Result<f64> {
        self.check_arm(arm)?;
        Ok(self.laws[arm].sample_with(stream.next_uniform()))
    }

    pub fn gap_profile(&self) -> GapProfile {
        GapProfile::from_means(&self.means)
    }

    pub fn hardness(&self) -> Result<Hardness> {
        Hardness::from_gaps(&self.gap_profile().gaps_sorted, self.dim(), self.privacy.epsilon)
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.arms() {
            return Err(Error::ArmOutOfRange { arm, arms: self.arms() });
        }
        Ok(())
    }
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Sub-optimality gaps in nondecreasing order together with the arms
/// realizing that order. Equal gaps are ordered by ascending arm index.
#[derive(Clone, Debug, PartialEq)]
pub struct GapProfile {
    pub gaps_sorted: Vec<f64>,
    pub permutation: Vec<usize>,
}

impl GapProfile {
    pub fn from_means(means: &[f64]) -> Self {
        let top = means[argmax_first(means)];
        let gaps: Vec<f64> = means.iter().map(|m| top - m).collect();
        let mut permutation: Vec<usize> = (0..means.len()).collect();
        permutation.sort_by(|&i, &j| gaps[i].total_cmp(&gaps[j]).then(i.cmp(&j)));
        let gaps_sorted = permutation.iter().map(|&i| gaps[i]).collect();
        Self { gaps_sorted, permutation }
    }

    /// `Δ_(i)` with the 1-based rank `i`.
    pub fn gap(&self, rank: usize) -> f64 {
        self.gaps_sorted[rank - 1]
    }
}

/// `H = H_BAI + H_pri`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hardness {
    pub h_bai: f64,
    pub h_pri: f64,
    pub h: f64,
}

impl Hardness {
    /// Hardness from nondecreasing gaps (`gaps_sorted[0] = 0`), the ambient
    /// dimension `d` and `ε`. The maxima run over ranks `2..=min(d², K)`.
    pub fn from_gaps(gaps_sorted: &[f64], dim: usize, epsilon: f64) -> Result<Self> {
        let top = dim.saturating_mul(dim).min(gaps_sorted.len());
        if top < 2 {
            return Err(Error::HardnessRange(top));
        }
        if gaps_sorted[1] <= 0.0 {
            return Err(Error::NonUniqueBest { first: 0, second: 1 });
        }
        let mut bai = 0.0f64;
        let mut pri = 0.0f64;
        for rank in 2..=top {
            let gap = gaps_sorted[rank - 1];
            bai = bai.max(rank as f64 / (gap * gap));
            pri = pri.max(rank as f64 / gap);
        }
        let h_pri = pri / epsilon;
        Ok(Self { h_bai: bai, h_pri, h: bai + h_pri })
    }

    /// DP-BAI error bound `exp(−T'/(65·M·H))` for a schedule's `T'` and `M`.
    pub fn error_bound(&self, t_prime: i64, phases: usize) -> f64 {
        exp(-(t_prime as f64) / (65.0 * phases as f64 * self.h))
    }
}

/// Binomial standard deviation `sqrt(p(1-p)/n)`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    sqrt(p * (1.0 - p) / n as f64)
}
