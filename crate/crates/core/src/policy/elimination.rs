//! DP-BAI and its variants: phased elimination on private mean estimates.

use alloc::vec::Vec;

use super::{noise_spec, top_arms, Branch, PhaseRecord, Transcript};
use crate::bandit::{Bandit, RewardSource};
use crate::maxdet::{coordinates_in_basis, max_det_collection, reduce_dimension};
use crate::model::Privacy;
use crate::privacy::Mechanism;
use crate::rng::UniformStream;
use crate::schedule::{phase_schedule_with, BranchRule};
use crate::{Error, Result};

pub(super) fn run<S: RewardSource>(
    features: &[Vec<f64>],
    privacy: Privacy,
    mechanism: Mechanism,
    rule: BranchRule,
    mut bandit: Bandit<S>,
    noise: &mut UniformStream,
) -> Result<Transcript> {
    let k = features.len();
    let d = features.first().map_or(0, Vec::len);
    if bandit.arms() != k {
        return Err(Error::LawCount { expected: k, got: bandit.arms() });
    }
    let sched = phase_schedule_with(k, d, bandit.budget(), rule)?;

    let mut active: Vec<usize> = (0..k).collect();
    // Vectors of the active arms in the previous phase's coordinates.
    let mut current: Vec<Vec<f64>> = features.to_vec();
    let mut phases = Vec::with_capacity(sched.m);

    for p in 1..=sched.m {
        let reduced = reduce_dimension(&current);
        let dp = reduced.dim;
        let vectors = reduced.vectors;
        let mut record = PhaseRecord {
            phase: p,
            active: active.clone(),
            branch: Branch::Uniform,
            dim: dp,
            sampled: Vec::new(),
            pulls: alloc::vec![0; active.len()],
            reduced: vectors.clone(),
            coefficients: Vec::new(),
            estimates: alloc::vec![0.0; active.len()],
            noise: Vec::new(),
            survivors: Vec::new(),
        };

        if sched.uses_max_det(p, dp) {
            record.branch = Branch::MaxDet;
            if dp > 0 {
                let collection = max_det_collection(&vectors, dp)?;
                let n = sched.pulls_per_arm(dp);
                let mut means = Vec::with_capacity(dp);
                for &slot in &collection.indices {
                    means.push(bandit.pull_mean(active[slot], n)?);
                    record.pulls[slot] = n;
                }
                let spec = noise_spec(mechanism, privacy, n)?;
                for m in means.iter_mut() {
                    *m += spec.sample(noise);
                    record.noise.push(spec);
                }
                let mut coefficients = Vec::with_capacity(active.len());
                for (slot, v) in vectors.iter().enumerate() {
                    let alpha = match collection.indices.binary_search(&slot) {
                        // Members keep their own private mean exactly.
                        Ok(pos) => {
                            let mut e = alloc::vec![0.0; dp];
                            e[pos] = 1.0;
                            e
                        }
                        Err(_) => coordinates_in_basis(v, &collection)?,
                    };
                    record.estimates[slot] = alpha.iter().zip(&means).map(|(a, m)| a * m).sum();
                    coefficients.push(alpha);
                }
                record.coefficients = coefficients;
                record.sampled = collection.indices.iter().map(|&slot| active[slot]).collect();
            }
        } else {
            let n = sched.pulls_per_arm(active.len());
            for (slot, &arm) in active.iter().enumerate() {
                record.estimates[slot] = bandit.pull_mean(arm, n)?;
                record.pulls[slot] = n;
            }
            let spec = noise_spec(mechanism, privacy, n)?;
            for est in record.estimates.iter_mut() {
                *est += spec.sample(noise);
                record.noise.push(spec);
            }
            record.sampled = active.clone();
        }

        let keep = sched.size(p + 1);
        let survivors = top_arms(&active, &record.estimates, keep);
        let mut next = Vec::with_capacity(keep);
        for (slot, &arm) in active.iter().enumerate() {
            if survivors.binary_search(&arm).is_ok() {
                next.push(vectors[slot].clone());
            }
        }
        record.survivors = survivors.clone();
        phases.push(record);
        active = survivors;
        current = next;
    }

    let best = active[0];
    bandit.exhaust(best)?;
    Ok(bandit.finish(best, phases))
}
