//! OD-LinBAI and DP-OD: halving elimination with G-optimal designs and
//! least-squares estimates.
//!
//! With `d0` the rank of all arm vectors there are `R = ⌈log₂ d0⌉` phases
//! (one when `d0 = 1`) keeping `⌈d0/2^r⌉` arms after phase `r`, each with
//! `⌊T/R⌋` pulls. A phase computes a design `w` over the active arms, pulls
//! arm `i` `⌈w_i·(m − |supp w|)⌉` times and estimates `θ` by OLS in the
//! reduced coordinates. DP-OD adds `Lap(L/ε)` to each coordinate of the
//! moment vector `U = Σ x_i·(reward sum of i)` with `L = max_i ‖a_i‖`.

use alloc::vec::Vec;

use super::{top_arms, Branch, PhaseRecord, Transcript};
use crate::bandit::{Bandit, RewardSource};
use crate::design::{g_optimal_design, SUPPORT_THRESHOLD};
use crate::matrix::Matrix;
use crate::maxdet::{reduce_dimension, reduce_dimension_with, RANK_TOLERANCE};
use crate::model::Privacy;
use crate::num::{dot, norm};
use crate::privacy::{Mechanism, NoiseSpec};
use crate::rng::UniformStream;
use crate::{Error, Result};

/// Arms kept after each phase, ending at 1.
pub(crate) fn phase_targets(features: &[Vec<f64>]) -> Vec<usize> {
    let k = features.len();
    let d0 = reduce_dimension(features).dim.max(1);
    let mut targets = Vec::new();
    let mut current = k;
    let mut r = 0u32;
    loop {
        r += 1;
        let t = d0.div_ceil(1usize << r.min(63)).max(1);
        if t < current {
            targets.push(t);
            current = t;
        }
        if t == 1 {
            break;
        }
    }
    if targets.last() != Some(&1) {
        targets.push(1);
    }
    targets
}

pub(crate) fn minimum_budget(features: &[Vec<f64>]) -> usize {
    phase_targets(features).len() * (features.len() + 1)
}

pub(super) fn run<S: RewardSource>(
    features: &[Vec<f64>],
    privacy: Privacy,
    private: bool,
    mut bandit: Bandit<S>,
    noise: &mut UniformStream,
) -> Result<Transcript> {
    let k = features.len();
    if bandit.arms() != k {
        return Err(Error::LawCount { expected: k, got: bandit.arms() });
    }
    let targets = phase_targets(features);
    let minimum = targets.len() * (k + 1);
    if bandit.budget() < minimum {
        return Err(Error::InsufficientBudget { budget: bandit.budget(), minimum });
    }
    let per_phase = bandit.budget() / targets.len();
    let spec = if private {
        let bound = features.iter().map(|a| norm(a)).fold(0.0, f64::max);
        Some(NoiseSpec::new(Mechanism::Laplace, privacy.epsilon, 0.0, 1, bound)?)
    } else {
        None
    };

    let mut active: Vec<usize> = (0..k).collect();
    let mut phases = Vec::with_capacity(targets.len());
    for (r, &keep) in targets.iter().enumerate() {
        let current: Vec<&[f64]> = active.iter().map(|&i| features[i].as_slice()).collect();
        let reduced = reduce_dimension_with(&current, RANK_TOLERANCE);
        let dp = reduced.dim;
        let vectors = reduced.vectors;
        let mut record = PhaseRecord {
            phase: r + 1,
            active: active.clone(),
            branch: Branch::Design,
            dim: dp,
            sampled: Vec::new(),
            pulls: alloc::vec![0; active.len()],
            reduced: vectors.clone(),
            coefficients: Vec::new(),
            estimates: alloc::vec![0.0; active.len()],
            noise: Vec::new(),
            survivors: Vec::new(),
        };

        if dp > 0 {
            let design = g_optimal_design(&vectors)?;
            let weights = design.pruned(&vectors, SUPPORT_THRESHOLD);
            let support = weights.iter().filter(|&&w| w > 0.0).count();
            let spread = (per_phase - support) as f64;
            let mut gram = Matrix::zeros(dp, dp);
            let mut moment = alloc::vec![0.0; dp];
            for (slot, &arm) in active.iter().enumerate() {
                if weights[slot] <= 0.0 {
                    continue;
                }
                let n = crate::num::ceil(weights[slot] * spread) as usize;
                if n == 0 {
                    continue;
                }
                let sum = bandit.pull_sum(arm, n)?;
                record.pulls[slot] = n;
                record.sampled.push(arm);
                let x = &vectors[slot];
                for a in 0..dp {
                    moment[a] += x[a] * sum;
                    for b in 0..dp {
                        gram[(a, b)] += n as f64 * x[a] * x[b];
                    }
                }
            }
            if let Some(spec) = spec {
                for u in moment.iter_mut() {
                    *u += spec.sample(noise);
                    record.noise.push(spec);
                }
            }
            let theta = gram.lu()?.ok_or(Error::SingularGram)?.solve(&moment);
            for (slot, x) in vectors.iter().enumerate() {
                record.estimates[slot] = dot(x, &theta);
            }
        }

        let survivors = top_arms(&active, &record.estimates, keep);
        record.survivors = survivors.clone();
        phases.push(record);
        active = survivors;
    }

    let best = active[0];
    bandit.exhaust(best)?;
    Ok(bandit.finish(best, phases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn targets_follow_rank() {
        let two: Vec<Vec<f64>> = (0..30).map(|i| vec![1.0, i as f64]).collect();
        assert_eq!(phase_targets(&two), vec![1]);
        let e3: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        assert_eq!(phase_targets(&e3), vec![2, 1]);
        let e8: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        assert_eq!(phase_targets(&e8), vec![4, 2, 1]);
    }
}
