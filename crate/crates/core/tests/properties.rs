use dpbai_core::maxdet::{coordinates_in_basis, max_det_collection, max_det_collection_with, MaxDetOptions};
use dpbai_core::policy::{self, PolicyKind};
use dpbai_core::schedule::{phase_schedule_with, BranchRule};
use dpbai_core::{Instance, Privacy, RewardLaw, TrialStreams};
use proptest::prelude::*;

/// Determinant by cofactor expansion; independent of the LU path.
fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn brute_force_max(vectors: &[Vec<f64>], d: usize) -> f64 {
    let n = vectors.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != d {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vectors[i].clone()).collect();
        best = best.max(cofactor_det(&rows).abs());
    }
    best
}

fn vector_set() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), d..=12)))
}

fn linear_instance() -> impl Strategy<Value = Instance> {
    (2usize..=5, 2usize..=40).prop_flat_map(|(d, k)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..1.0, d), k),
            prop::collection::vec(0.0f64..1.0, d),
            prop::sample::select(vec![0u8, 1, 2]),
        )
            .prop_filter_map("tied best arm", move |(features, theta, fam)| {
                let scale: f64 = theta.iter().sum::<f64>() * 1.0001;
                let theta: Vec<f64> = theta.iter().map(|t| t / scale.max(1e-9) * 0.5).collect();
                let family = match fam {
                    0 => RewardLaw::Bernoulli { mean: 0.0 },
                    1 => RewardLaw::UniformZeroToTwoMu { mean: 0.0 },
                    _ => RewardLaw::PointMass { value: 0.0 },
                };
                Instance::with_family(features, theta, family, Privacy::new(1.0, 0.1).unwrap()).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_selection_matches_brute_force((d, v) in vector_set()) {
        let oracle = brute_force_max(&v, d);
        prop_assume!(oracle > 1e-6);
        let c = max_det_collection(&v, d).unwrap();
        prop_assert!(c.certified);
        prop_assert!((c.det_abs - oracle).abs() <= 1e-9 * oracle, "{} vs {}", c.det_abs, oracle);
    }

    #[test]
    fn coordinates_bounded_by_one((d, v) in vector_set()) {
        prop_assume!(brute_force_max(&v, d) > 1e-6);
        let c = max_det_collection(&v, d).unwrap();
        for x in &v {
            let alpha = coordinates_in_basis(x, &c).unwrap();
            prop_assert!(alpha.iter().all(|a| a.abs() <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn swap_search_also_bounded((d, v) in vector_set()) {
        prop_assume!(brute_force_max(&v, d) > 1e-6);
        let opts = MaxDetOptions { exact_limit: 0, ..MaxDetOptions::default() };
        let c = max_det_collection_with(&v, d, &opts).unwrap();
        for x in &v {
            let alpha = coordinates_in_basis(x, &c).unwrap();
            prop_assert!(alpha.iter().all(|a| a.abs() <= 1.0 + 1e-6));
        }
    }

    #[test]
    fn schedule_is_budget_safe(k in 2usize..3000, d in 2usize..20, extra in 0usize..5000) {
        for rule in [BranchRule::MaxDetWhenSparse, BranchRule::AlwaysUniform] {
            let min = dpbai_core::schedule::minimum_budget(k, d, rule).unwrap();
            let s = phase_schedule_with(k, d, min + extra, rule).unwrap();
            prop_assert!(s.worst_case_pulls() <= min + extra);
            prop_assert!(s.t_alloc as i64 <= s.t_prime);
            prop_assert_eq!(s.sizes[0], k);
            prop_assert_eq!(*s.sizes.last().unwrap(), 1);
            prop_assert_eq!(s.sizes.len(), s.m + 1);
            prop_assert!(s.sizes.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn policies_spend_exactly_the_budget(inst in linear_instance(), extra in 0usize..3000, trial in 0u64..1000) {
        for kind in [PolicyKind::DpBai, PolicyKind::DpBaiGauss, PolicyKind::Baseline, PolicyKind::OdLinBai, PolicyKind::DpOd] {
            let t = policy::minimum_budget(&kind, inst.features()).unwrap() + extra;
            let tr = policy::run(&kind, &inst, t, &TrialStreams::new(11, 0, trial)).unwrap();
            prop_assert_eq!(tr.actions.len(), t);
            prop_assert_eq!(tr.counts(inst.arms()).iter().sum::<usize>(), t);
            let phase_pulls: usize = tr.phases.iter().map(|p| p.pulls.iter().sum::<usize>()).sum();
            prop_assert!(phase_pulls <= t);
            for w in tr.phases.windows(2) {
                prop_assert_eq!(&w[0].survivors, &w[1].active);
            }
            let last = tr.phases.last().unwrap();
            prop_assert_eq!(last.survivors.len(), 1);
            prop_assert_eq!(tr.recommendation as usize, last.survivors[0] + 1);
        }
    }
}
