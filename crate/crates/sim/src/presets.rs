//! Reproduction presets.
//!
//! * `fig1`: the 30-arm synthetic instance, policies dp-bai, baseline,
//!   od-linbai and dp-od, `T ∈ {100, 200, 500, 1000, 2000, 5000, 10000,
//!   20000}`, `ε ∈ {0.5, 1, 2, 5, 10⁹}`, 1000 trials. DP-BAI already
//!   succeeds on every trial at `T = 2000`, so the grid reaches down to
//!   where success rates are still moving.
//! * `dpod-sweep`: the two-armed instance `a_1 = [1, 0]`, `a_2 = [0, y]`
//!   with gap 0.05 for `y ∈ {2, 10, 100}`, dp-bai against dp-od; one output
//!   file per `y`.

use std::path::Path;

use crate::config::{ExperimentConfig, InstanceSpec, PresetInstance};
use crate::{Result, SimError};

pub const PRESETS: [&str; 2] = ["fig1", "dpod-sweep"];

pub const FIG1_BUDGETS: [usize; 8] = [100, 200, 500, 1000, 2000, 5000, 10_000, 20_000];
pub const FIG1_EPSILONS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 1e9];
pub const SWEEP_Y: [f64; 3] = [2.0, 10.0, 100.0];
pub const SWEEP_BUDGET: usize = 1000;
pub const SWEEP_EPSILON: f64 = 1.0;
pub const SWEEP_GAP: f64 = 0.05;

pub fn fig1(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        instance: InstanceSpec::Preset(PresetInstance::Synthetic30 { omega_seed: 0 }),
        policies: ["dp-bai", "baseline", "od-linbai", "dp-od"].map(String::from).to_vec(),
        t_grid: FIG1_BUDGETS.to_vec(),
        epsilon_grid: FIG1_EPSILONS.to_vec(),
        delta: 0.0,
        trials: 1000,
        master_seed: 2024,
        output_path: dir.join("fig1.csv"),
        summary_path: None,
        timing: true,
    }
}

pub fn dpod_sweep(dir: &Path) -> Vec<ExperimentConfig> {
    SWEEP_Y
        .iter()
        .map(|&y| ExperimentConfig {
            instance: InstanceSpec::Preset(PresetInstance::TwoArmed { x: 1.0, y, gap: SWEEP_GAP }),
            policies: ["dp-bai", "dp-od"].map(String::from).to_vec(),
            t_grid: vec![SWEEP_BUDGET],
            epsilon_grid: vec![SWEEP_EPSILON],
            delta: 0.0,
            trials: 1000,
            master_seed: 2024,
            output_path: dir.join(format!("dpod-y{y}.csv")),
            summary_path: None,
            timing: true,
        })
        .collect()
}

/// Configs of a named preset, writing into `dir`.
pub fn preset(name: &str, dir: &Path) -> Result<Vec<ExperimentConfig>> {
    match name {
        "fig1" => Ok(vec![fig1(dir)]),
        "dpod-sweep" => Ok(dpod_sweep(dir)),
        _ => Err(SimError::Config(format!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            for c in preset(name, Path::new("out")).unwrap() {
                c.validate().unwrap();
            }
        }
        assert!(preset("fig2", Path::new(".")).is_err());
    }
}
