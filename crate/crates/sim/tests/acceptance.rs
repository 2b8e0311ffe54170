//! Acceptance gate. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use dpbai_core::bandit::RewardTable;
use dpbai_core::maxdet::{coordinates_in_basis, max_det_collection};
use dpbai_core::policy::{self, PolicyKind};
use dpbai_core::privacy::NoiseSpec;
use dpbai_core::schedule::{gh_sequences, lambda_param, phase_schedule, phase_schedule_with, BranchRule};
use dpbai_core::{Instance, Privacy, RewardLaw, TrialStreams, UniformStream};
use dpbai_sim::audit::{audit_dp, Event};
use dpbai_sim::experiment::{grid_key, run_point, TrialRecord};
use dpbai_sim::summary::summarize_records;
use statrs::distribution::{ContinuousCDF, Laplace, Normal};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Criterion = Box<dyn Fn() -> Vec<Verdict>>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn random_vectors(u: &mut UniformStream) -> (usize, Vec<Vec<f64>>) {
    let d = 1 + (u.next_u64() % 4) as usize;
    let n = d + (u.next_u64() % (13 - d as u64)) as usize;
    let v = (0..n).map(|_| (0..d).map(|_| 2.0 * u.next_uniform() - 1.0).collect()).collect();
    (d, v)
}

fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn brute_force_max(v: &[Vec<f64>], d: usize) -> f64 {
    (0u32..1 << v.len())
        .filter(|m| m.count_ones() as usize == d)
        .map(|mask| {
            let rows: Vec<Vec<f64>> = (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i].clone()).collect();
            cofactor_det(&rows).abs()
        })
        .fold(0.0, f64::max)
}

fn c1_coordinate_bound() -> Verdict {
    let mut u = UniformStream::from_seed_u64(101);
    let mut worst = 0.0f64;
    let mut sets = 0;
    while sets < 200 {
        let (d, v) = random_vectors(&mut u);
        let Ok(c) = max_det_collection(&v, d) else { continue };
        sets += 1;
        for x in &v {
            let alpha = coordinates_in_basis(x, &c).unwrap();
            worst = alpha.iter().fold(worst, |w, a| w.max(a.abs()));
        }
    }
    check(worst <= 1.0 + 1e-9, format!("max |alpha| = {worst:.12} over {sets} sets"))
}

fn c2_oracle_equivalence() -> Verdict {
    let mut u = UniformStream::from_seed_u64(202);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 100 {
        let (d, v) = random_vectors(&mut u);
        let oracle = brute_force_max(&v, d);
        if oracle < 1e-9 {
            continue;
        }
        n += 1;
        let c = max_det_collection(&v, d).unwrap();
        worst = worst.max((c.det_abs - oracle).abs() / oracle);
    }
    check(worst <= 1e-9, format!("max relative det error {worst:.3e} over {n} instances"))
}

fn c3_schedule() -> Vec<Verdict> {
    let lambda = lambda_param(10_000, 16).unwrap();
    let (_, h) = gh_sequences(10_000, 16).unwrap();
    let s = phase_schedule(10_000, 16, 10_000_000).unwrap();
    let ok = (lambda - 27.65).abs() <= 0.05 && h[1] == 359 && h[2] == 13 && s.size(2) == 423 && s.size(3) == 77;
    vec![
        check(
            ok,
            format!("lambda = {lambda:.4}, h_1 = {}, h_2 = {}, s_2 = {}, s_3 = {}", h[1], h[2], s.size(2), s.size(3)),
        ),
        Verdict::Skip(format!(
            "M_1/M: formulas give M_1 = {}, M = {}; the appendix table lists values inconsistent with its own h and g",
            s.m1, s.m
        )),
    ]
}

fn fuzz_instance(u: &mut UniformStream) -> Option<Instance> {
    let d = 2 + (u.next_u64() % 4) as usize;
    let k = 2 + (u.next_u64() % 60) as usize;
    let theta: Vec<f64> = (0..d).map(|_| u.next_uniform() / d as f64).collect();
    let features = (0..k).map(|_| (0..d).map(|_| u.next_uniform()).collect()).collect();
    let family = match u.next_u64() % 3 {
        0 => RewardLaw::Bernoulli { mean: 0.0 },
        1 => RewardLaw::UniformZeroToTwoMu { mean: 0.0 },
        _ => RewardLaw::PointMass { value: 0.0 },
    };
    Instance::with_family(features, theta, family, Privacy::new(0.1 + 3.0 * u.next_uniform(), 0.1).ok()?).ok()
}

fn c4_budget_safety() -> Verdict {
    let kinds = [PolicyKind::DpBai, PolicyKind::DpBaiGauss, PolicyKind::Baseline, PolicyKind::OdLinBai, PolicyKind::DpOd];
    let mut problems = Vec::new();
    let mut runs = 0;
    for kind in &kinds {
        let mut u = UniformStream::from_seed_u64(404);
        let mut done = 0;
        while done < 500 {
            let Some(inst) = fuzz_instance(&mut u) else { continue };
            let min = policy::minimum_budget(kind, inst.features()).unwrap();
            let t = min + (u.next_u64() % 3000) as usize;
            let tr = match policy::run(kind, &inst, t, &TrialStreams::new(4, 0, done)) {
                Ok(tr) => tr,
                Err(e) => {
                    problems.push(format!("{kind}: {e}"));
                    done += 1;
                    continue;
                }
            };
            done += 1;
            runs += 1;
            let total: usize = tr.counts(inst.arms()).iter().sum();
            if total > t {
                problems.push(format!("{kind}: {total} pulls with T = {t}"));
            }
            let sizes: Option<Vec<usize>> = match kind {
                PolicyKind::DpBai | PolicyKind::DpBaiGauss => {
                    Some(phase_schedule(inst.arms(), inst.dim(), t).unwrap().sizes)
                }
                PolicyKind::Baseline => {
                    Some(phase_schedule_with(inst.arms(), inst.dim(), t, BranchRule::AlwaysUniform).unwrap().sizes)
                }
                _ => None,
            };
            for (p, ph) in tr.phases.iter().enumerate() {
                let want = sizes.as_ref().map(|s| s[p + 1]);
                if want.is_some_and(|w| w != ph.survivors.len()) || ph.survivors.is_empty() {
                    problems.push(format!("{kind}: phase {} kept {} arms", p + 1, ph.survivors.len()));
                }
            }
            if tr.phases.last().map(|p| p.survivors.len()) != Some(1) {
                problems.push(format!("{kind}: last phase does not end with one arm"));
            }
        }
    }
    check(problems.is_empty(), format!("{runs} runs over 5 policies; problems: {:?}", problems.first()))
}

fn c5_theorem_one() -> Verdict {
    let inst = Instance::orthogonal(&[0.8, 0.5, 0.5], RewardLaw::Bernoulli { mean: 0.0 }, Privacy::pure(2.0).unwrap())
        .unwrap();
    let h = inst.hardness().unwrap();
    let mut t = 10;
    let (sched, bound) = loop {
        let s = phase_schedule(3, 3, t).unwrap();
        let b = h.error_bound(s.t_prime, s.m);
        if b <= 0.2 {
            break (s, b);
        }
        t += 10;
    };
    let trials = 10_000u64;
    let key = grid_key(t, 2.0);
    let errors = (0..trials)
        .filter(|&i| policy::run_dp_bai(&inst, t, &TrialStreams::new(5, key, i)).unwrap().recommendation != 1)
        .count();
    let rate = errors as f64 / trials as f64;
    let sigma = dpbai_core::model::binomial_sigma(bound, trials as usize);
    check(
        rate <= bound + 3.0 * sigma,
        format!("H = {:.2}, T = {t}, T' = {}, M = {}, bound = {bound:.4}, error = {rate:.4}", h.h, sched.t_prime, sched.m),
    )
}

fn rate(records: &[TrialRecord]) -> (f64, (f64, f64)) {
    let s = summarize_records(records);
    (s[0].rate.unwrap(), s[0].wilson.unwrap())
}

fn c6_figure_trend() -> Verdict {
    let t = 500;
    let run = |kind: PolicyKind, eps: f64| {
        let inst = Instance::synthetic_30(0, Privacy::pure(eps).unwrap()).unwrap();
        rate(&run_point(&inst, &kind, t, 1000, 2024, false))
    };
    let (dp, dp_ci) = run(PolicyKind::DpBai, 1.0);
    let (base, base_ci) = run(PolicyKind::Baseline, 1.0);
    let (dp_inf, _) = run(PolicyKind::DpBai, 1e9);
    let (od_inf, _) = run(PolicyKind::OdLinBai, 1e9);
    let ok = dp - base >= 0.05 && dp_ci.0 > base_ci.1 && (dp_inf - od_inf).abs() <= 0.05;
    check(
        ok,
        format!(
            "T = {t}, eps = 1: dp-bai {dp:.3} [{:.3}, {:.3}] vs baseline {base:.3} [{:.3}, {:.3}]; eps = 1e9: dp-bai {dp_inf:.3} vs od-linbai {od_inf:.3}",
            dp_ci.0, dp_ci.1, base_ci.0, base_ci.1
        ),
    )
}

fn c7_dp_od_degradation() -> Verdict {
    let (t, eps) = (1000, 1.0);
    let run = |kind: PolicyKind, y: f64| {
        let inst = Instance::two_armed(1.0, y, 0.05, Privacy::pure(eps).unwrap()).unwrap();
        rate(&run_point(&inst, &kind, t, 1000, 2024, false))
    };
    let (od2, _) = run(PolicyKind::DpOd, 2.0);
    let (od100, _) = run(PolicyKind::DpOd, 100.0);
    let (bai2, ci2) = run(PolicyKind::DpBai, 2.0);
    let (bai100, ci100) = run(PolicyKind::DpBai, 100.0);
    let overlap = ci2.0 <= ci100.1 && ci100.0 <= ci2.1;
    check(
        od2 - od100 >= 0.1 && overlap,
        format!("T = {t}, eps = {eps}: dp-od y=2 {od2:.3}, y=100 {od100:.3}; dp-bai y=2 {bai2:.3}, y=100 {bai100:.3}"),
    )
}

fn c8_es_coupling() -> Verdict {
    let inst = Instance::synthetic_30(0, Privacy::pure(1.0).unwrap()).unwrap();
    let es = policy::es_wrap(PolicyKind::DpBai, 150, 0, 30).unwrap();
    let (mut same, mut stopped, mut bad) = (0, 0, 0);
    for trial in 0..10_000 {
        let s = TrialStreams::new(8, 0, trial);
        let a = policy::run_dp_bai(&inst, 300, &s).unwrap();
        let b = policy::run(&es, &inst, 300, &s).unwrap();
        if a.counts(30)[1] < 150 {
            if a.actions == b.actions && a.rewards == b.rewards && a.recommendation == b.recommendation {
                same += 1;
            } else {
                bad += 1;
            }
        } else if b.recommendation == 0 {
            stopped += 1;
        } else {
            bad += 1;
        }
    }
    check(bad == 0 && same > 0 && stopped > 0, format!("{same} identical, {stopped} stopped, {bad} mismatched"))
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn c9_mechanisms() -> Verdict {
    let n = 100_000;
    let critical = 1.628 / (n as f64).sqrt();
    let lap = NoiseSpec::laplace(1.0, 1000).unwrap();
    let gauss = NoiseSpec::gaussian(1.0, 0.05, 100).unwrap();
    let mut s = UniformStream::from_seed_u64(909);
    let xs: Vec<f64> = (0..n).map(|_| lap.sample(&mut s)).collect();
    let d_lap = ks_statistic(xs, |x| Laplace::new(0.0, 1.0 / (1.0 * 1000.0)).unwrap().cdf(x));
    let sigma = (2.0 * (1.25f64 / 0.05).ln()).sqrt() / (1.0 * 100.0);
    let xs: Vec<f64> = (0..n).map(|_| gauss.sample(&mut s)).collect();
    let d_gauss = ks_statistic(xs, |x| Normal::new(0.0, sigma).unwrap().cdf(x));
    check(
        d_lap < critical && d_gauss < critical,
        format!("D_laplace = {d_lap:.5}, D_gauss = {d_gauss:.5}, critical = {critical:.5}"),
    )
}

fn c10_audit() -> Verdict {
    let features = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.4, 0.4], vec![0.3, 0.5], vec![0.5, 0.2]];
    let inst = Instance::with_family(
        features,
        vec![0.5, 0.55],
        RewardLaw::Bernoulli { mean: 0.0 },
        Privacy::pure(0.5).unwrap(),
    )
    .unwrap();
    let t = 12;
    let rows = [0.5, 0.6, 0.3, 0.3, 0.3];
    let cells: Vec<f64> = rows.iter().flat_map(|&r| std::iter::repeat_n(r, t)).collect();
    let base = RewardTable::new(5, t, cells).unwrap();
    let other = base.with_cell(0, 0, 1.0).unwrap();
    let events: Vec<Event> = (1..=5).map(Event::Recommended).collect();
    let audit = |kind: PolicyKind| {
        audit_dp(&kind, inst.features(), inst.privacy(), (&base, &other), t, &events, 100_000, 10, 3.0).unwrap()
    };
    let private = audit(PolicyKind::DpBai);
    let broken = audit(PolicyKind::NoiselessDpBai);
    let worst = private.iter().map(|r| r.lower_bound).fold(0.0, f64::max);
    let best_est = private.iter().map(|r| r.epsilon_hat).filter(|e| e.is_finite()).fold(0.0, f64::max);
    let caught = broken.iter().map(|r| r.lower_bound).fold(0.0, f64::max);
    check(
        private.iter().all(|r| !r.violation()) && broken.iter().any(|r| r.violation()),
        format!("dp-bai: max lower bound {worst:.4}, max estimate {best_est:.4} (eps = 0.5); noiseless: max lower bound {caught:.3}"),
    )
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 max-det coordinate bound", Box::new(|| vec![c1_coordinate_bound()])),
        ("2 max-det oracle equivalence", Box::new(|| vec![c2_oracle_equivalence()])),
        ("3 schedule reproduction", Box::new(c3_schedule)),
        ("4 budget safety", Box::new(|| vec![c4_budget_safety()])),
        ("5 error bound sanity", Box::new(|| vec![c5_theorem_one()])),
        ("6 synthetic-instance trend", Box::new(|| vec![c6_figure_trend()])),
        ("7 dp-od degradation", Box::new(|| vec![c7_dp_od_degradation()])),
        ("8 early-stopping coupling", Box::new(|| vec![c8_es_coupling()])),
        ("9 mechanism distributions", Box::new(|| vec![c9_mechanisms()])),
        ("10 privacy audit", Box::new(|| vec![c10_audit()])),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let verdicts = run();
        let secs = start.elapsed().as_secs_f64();
        for v in verdicts {
            let (tag, detail) = match v {
                Verdict::Pass(d) => ("PASS", d),
                Verdict::Fail(d) => {
                    failed += 1;
                    ("FAIL", d)
                }
                Verdict::Skip(d) => ("SKIP", d),
            };
            println!("criterion {name}: {tag} ({secs:.1}s) {detail}");
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
