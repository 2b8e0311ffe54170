//! JSON configuration files.
//!
//! An instance is either explicit
//!
//! ```json
//! {"features": [[0, 1], [1, 0]], "theta": [0.5, 0.3],
//!  "rewards": [{"kind": "bernoulli", "mean": 0.5}, {"kind": "bernoulli", "mean": 0.3}],
//!  "epsilon": 1.0, "delta": 0.0}
//! ```
//!
//! (with `"family": "uniform"` instead of `rewards` to derive every law from
//! `a_i·θ`), or a preset such as `{"preset": "synthetic-30", "omega_seed": 7}`,
//! `{"preset": "two-armed", "x": 1, "y": 100, "gap": 0.05}` or
//! `{"preset": "orthogonal", "means": [0.8, 0.5], "family": "bernoulli"}`.

use std::path::{Path, PathBuf};

use dpbai_core::{Instance, PolicyKind, Privacy, RewardLaw};
use serde::{Deserialize, Serialize};

use crate::{read_json, Result, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Bernoulli,
    Uniform,
    PointMass,
}

impl LawKind {
    fn law(self, mean: f64) -> dpbai_core::Result<RewardLaw> {
        match self {
            Self::Bernoulli => RewardLaw::bernoulli(mean),
            Self::Uniform => RewardLaw::uniform(mean),
            Self::PointMass => RewardLaw::point_mass(mean),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSpec {
    pub kind: LawKind,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PresetInstance {
    #[serde(rename = "synthetic-30")]
    Synthetic30 {
        #[serde(default)]
        omega_seed: u64,
    },
    TwoArmed { x: f64, y: f64, gap: f64 },
    Orthogonal { means: Vec<f64>, family: LawKind },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInstance {
    pub features: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<Vec<RewardSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<LawKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Preset(PresetInstance),
    Explicit(ExplicitInstance),
}

impl InstanceSpec {
    /// Builds the instance. Presets carry no privacy level and get `privacy`;
    /// explicit instances use their own `epsilon`/`delta` when given.
    pub fn build(&self, privacy: Privacy) -> Result<Instance> {
        Ok(match self {
            Self::Preset(PresetInstance::Synthetic30 { omega_seed }) => Instance::synthetic_30(*omega_seed, privacy)?,
            Self::Preset(PresetInstance::TwoArmed { x, y, gap }) => Instance::two_armed(*x, *y, *gap, privacy)?,
            Self::Preset(PresetInstance::Orthogonal { means, family }) => {
                Instance::orthogonal(means, family.law(0.0)?, privacy)?
            }
            Self::Explicit(e) => {
                let privacy = Privacy::new(e.epsilon.unwrap_or(privacy.epsilon), e.delta.unwrap_or(privacy.delta))?;
                match (&e.rewards, e.family) {
                    (Some(rewards), None) => {
                        let laws = rewards.iter().map(|r| r.kind.law(r.mean)).collect::<dpbai_core::Result<_>>()?;
                        Instance::new(e.features.clone(), e.theta.clone(), laws, privacy)?
                    }
                    (None, Some(family)) => {
                        Instance::with_family(e.features.clone(), e.theta.clone(), family.law(0.0)?, privacy)?
                    }
                    _ => return Err(SimError::Config("give exactly one of `rewards` and `family`".into())),
                }
            }
        })
    }

    /// Builds with the instance's own privacy level (`ε = 1`, `δ = 0` for
    /// presets).
    pub fn build_default(&self) -> Result<Instance> {
        self.build(Privacy::pure(1.0)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// Policy ids, e.g. `"dp-bai"` or `"es:dp-bai:50:1"`.
    pub policies: Vec<String>,
    pub t_grid: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
    #[serde(default)]
    pub delta: f64,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output_path: PathBuf,
    /// Summary CSV; defaults to `<output stem>.summary.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_path: Option<PathBuf>,
    /// Record per-trial wall time. Off gives byte-identical files.
    #[serde(default)]
    pub timing: bool,
}

fn default_output() -> PathBuf {
    PathBuf::from("results.csv")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config: Self = read_json(path)?;
        config.validate()?;
        Ok(config)
    }

    pub fn parsed_policies(&self) -> Result<Vec<PolicyKind>> {
        self.policies.iter().map(|id| id.parse().map_err(SimError::from)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.policies.is_empty() || self.t_grid.is_empty() || self.epsilon_grid.is_empty() {
            return Err(SimError::Config("policies, t_grid and epsilon_grid must be nonempty".into()));
        }
        if let Some(&t) = self.t_grid.iter().find(|&&t| t > u32::MAX as usize) {
            return Err(SimError::Config(format!("budget {t} does not fit in 32 bits")));
        }
        self.parsed_policies()?;
        for &eps in &self.epsilon_grid {
            Privacy::new(eps, self.delta)?;
        }
        Ok(())
    }

    pub fn summary_path(&self) -> PathBuf {
        self.summary_path.clone().unwrap_or_else(|| {
            let stem = self.output_path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
            self.output_path.with_file_name(format!("{stem}.summary.csv"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets_and_explicit() {
        let p: InstanceSpec = serde_json::from_str(r#"{"preset": "synthetic-30", "omega_seed": 3}"#).unwrap();
        assert_eq!(p, InstanceSpec::Preset(PresetInstance::Synthetic30 { omega_seed: 3 }));
        assert_eq!(p.build_default().unwrap().arms(), 30);
        let e: InstanceSpec = serde_json::from_str(
            r#"{"features": [[1, 0], [0, 1]], "theta": [0.5, 0.25],
                "rewards": [{"kind": "bernoulli", "mean": 0.5}, {"kind": "point-mass", "mean": 0.25}],
                "epsilon": 2.0}"#,
        )
        .unwrap();
        let inst = e.build_default().unwrap();
        assert_eq!(inst.privacy().epsilon, 2.0);
        assert_eq!(inst.best_arm(), 0);
        let bad: InstanceSpec = serde_json::from_str(r#"{"features": [[1]], "theta": [0.5]}"#).unwrap();
        assert!(bad.build_default().is_err());
    }

    #[test]
    fn summary_path_default() {
        let mut c: ExperimentConfig = serde_json::from_str(
            r#"{"instance": {"preset": "two-armed", "x": 1, "y": 2, "gap": 0.05},
                "policies": ["dp-bai"], "t_grid": [100], "epsilon_grid": [1],
                "trials": 3, "master_seed": 1, "output_path": "out/r.csv"}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.summary_path(), PathBuf::from("out/r.summary.csv"));
        c.trials = 0;
        assert!(c.validate().is_err());
        c.trials = 1;
        c.policies = vec!["ucb".into()];
        assert!(c.validate().is_err());
    }
}
