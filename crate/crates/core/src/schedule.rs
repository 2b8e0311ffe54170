//! Phase bookkeeping for DP-BAI.
//!
//! With `c = ⌈d²/4⌉` the timetable is
//!
//! ```text
//! λ   = inf{β ≥ 2 : β^{ln d} ≥ K − c}
//! g_0 = min{K, c},          g_i = ⌈g_{i−1}/2⌉
//! h_0 = max{K − c, 0},      h_i = ⌈(h_{i−1}+1)/λ⌉ − 1
//! M_1 = min{i ≥ 1 : h_i = 0}            (0 when h_0 = 0)
//! M   = M_1 + min{i ≥ 1 : g_i = 1} − 1
//! s_p = g_0 + h_{p−1} for p ≤ M_1, g_{p−M_1} afterwards
//! T'  = T − M_1·d − (M − M_1)·c
//! ```
//!
//! When `h_0 = 0` there is no first stage and the halving stage starts from
//! `s_1 = g_0 = K`, i.e. `s_p = g_{p−1}` and `M = min{i ≥ 1 : g_i = 1}`.
//!
//! Per-phase pull counts are ceilings of `T'/(M·c)`, so their sum can exceed
//! `T` when the rounding overhead of a phase is larger than the slack that
//! `T'` reserves for it. Pull counts are therefore computed from an
//! allocation budget `t_alloc ≤ T'`: the largest value for which the
//! worst-case total over every branch the policy could take stays within
//! `T`. In the usual case `t_alloc = T'`.

use alloc::vec::Vec;

use crate::num::{ceil, ln, pow};
use crate::{Error, Result};

/// Which sampling branches a policy may take in a phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchRule {
    /// Max-Det sampling when `d_p² < s_p`, uniform sampling otherwise.
    MaxDetWhenSparse,
    /// Always pull every active arm.
    AlwaysUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub arms: usize,
    pub dim: usize,
    pub budget: usize,
    pub lambda: f64,
    pub g_seq: Vec<usize>,
    pub h_seq: Vec<usize>,
    /// `s_1, …, s_{M+1}`.
    pub sizes: Vec<usize>,
    pub m1: usize,
    pub m: usize,
    pub t_prime: i64,
    pub t_alloc: usize,
    pub rule: BranchRule,
}

fn half_square(dim: usize) -> usize {
    (dim * dim).div_ceil(4)
}

fn check_args(arms: usize, dim: usize) -> Result<()> {
    if arms < 2 {
        return Err(Error::ScheduleArms(arms));
    }
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    Ok(())
}

/// `λ = inf{β ≥ 2 : β^{ln d} ≥ K − ⌈d²/4⌉}`.
pub fn lambda_param(arms: usize, dim: usize) -> Result<f64> {
    check_args(arms, dim)?;
    let excess = arms as f64 - half_square(dim) as f64;
    let log_d = ln(dim as f64);
    if excess <= pow(2.0, log_d) {
        Ok(2.0)
    } else {
        Ok(pow(excess, 1.0 / log_d))
    }
}

/// The `g` and `h` sequences, each continued one step past the point where
/// it reaches its fixed point (1 for `g`, 0 for `h`).
pub fn gh_sequences(arms: usize, dim: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let lambda = lambda_param(arms, dim)?;
    let c = half_square(dim);
    let mut g = alloc::vec![arms.min(c)];
    while *g.last().unwrap() > 1 {
        let next = g.last().unwrap().div_ceil(2);
        g.push(next);
    }
    g.push(1);
    let mut h = alloc::vec![arms.saturating_sub(c)];
    while *h.last().unwrap() > 0 {
        let prev = *h.last().unwrap();
        h.push(next_h(prev, lambda));
    }
    h.push(0);
    Ok((g, h))
}

fn next_h(prev: usize, lambda: f64) -> usize {
    (ceil((prev + 1) as f64 / lambda) as usize).saturating_sub(1)
}

struct Skeleton {
    lambda: f64,
    g: Vec<usize>,
    h: Vec<usize>,
    m1: usize,
    m: usize,
    sizes: Vec<usize>,
}

fn skeleton(arms: usize, dim: usize) -> Result<Skeleton> {
    let lambda = lambda_param(arms, dim)?;
    let (g, h) = gh_sequences(arms, dim)?;
    let m1 = if h[0] == 0 { 0 } else { (1..h.len()).find(|&i| h[i] == 0).unwrap() };
    let g_one = (1..g.len()).find(|&i| g[i] == 1).unwrap();
    let m = if m1 == 0 { g_one } else { m1 + g_one - 1 };
    let sizes = (1..=m + 1)
        .map(|p| {
            if m1 == 0 {
                g[p - 1]
            } else if p <= m1 {
                g[0] + h[p - 1]
            } else {
                g[p - m1]
            }
        })
        .collect();
    Ok(Skeleton { lambda, g, h, m1, m, sizes })
}

/// Group sizes a phase with `size` active arms could pull from.
fn branch_groups(size: usize, dim: usize, rule: BranchRule) -> Vec<usize> {
    match rule {
        BranchRule::AlwaysUniform => alloc::vec![size],
        BranchRule::MaxDetWhenSparse => {
            let top = dim.min(size);
            let mut groups: Vec<usize> = (1..=top).filter(|&c| c * c < size).collect();
            if top * top >= size {
                groups.push(size);
            }
            groups
        }
    }
}

fn worst_case_total(sizes: &[usize], dim: usize, phases: usize, rule: BranchRule, alloc_budget: usize) -> usize {
    sizes[..phases]
        .iter()
        .map(|&s| {
            branch_groups(s, dim, rule)
                .into_iter()
                .map(|c| c * alloc_budget.div_ceil(phases * c))
                .max()
                .unwrap_or(0)
        })
        .sum()
}

pub fn phase_schedule(arms: usize, dim: usize, budget: usize) -> Result<Schedule> {
    phase_schedule_with(arms, dim, budget, BranchRule::MaxDetWhenSparse)
}

pub fn phase_schedule_with(arms: usize, dim: usize, budget: usize, rule: BranchRule) -> Result<Schedule> {
    let sk = skeleton(arms, dim)?;
    let c = half_square(dim);
    let reserved = sk.m1 * dim + (sk.m - sk.m1) * c;
    let t_prime = budget as i64 - reserved as i64;
    let minimum = (sk.m + reserved).max(worst_case_total(&sk.sizes, dim, sk.m, rule, sk.m));
    if budget < minimum {
        return Err(Error::InsufficientBudget { budget, minimum });
    }
    // Largest allocation budget whose worst case fits in T.
    let (mut lo, mut hi) = (sk.m, t_prime as usize);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if worst_case_total(&sk.sizes, dim, sk.m, rule, mid) <= budget {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(Schedule {
        arms,
        dim,
        budget,
        lambda: sk.lambda,
        g_seq: sk.g,
        h_seq: sk.h,
        sizes: sk.sizes,
        m1: sk.m1,
        m: sk.m,
        t_prime,
        t_alloc: lo,
        rule,
    })
}

/// Smallest budget accepted by [`phase_schedule_with`].
pub fn minimum_budget(arms: usize, dim: usize, rule: BranchRule) -> Result<usize> {
    let sk = skeleton(arms, dim)?;
    let reserved = sk.m1 * dim + (sk.m - sk.m1) * half_square(dim);
    Ok((sk.m + reserved).max(worst_case_total(&sk.sizes, dim, sk.m, rule, sk.m)))
}

/// Nominal branch of a phase when the active arms span `min(d, s_p)`
/// dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NominalBranch {
    MaxDet,
    Uniform,
}

impl Schedule {
    /// `s_p` for the 1-based phase `p ∈ 1..=M+1`.
    pub fn size(&self, phase: usize) -> usize {
        self.sizes[phase - 1]
    }

    /// `⌈t_alloc / (M·group)⌉`: pulls per arm when `group` arms share a phase.
    pub fn pulls_per_arm(&self, group: usize) -> usize {
        self.t_alloc.div_ceil(self.m * group)
    }

    /// Upper bound on the pulls used by all phases, over every branch.
    pub fn worst_case_pulls(&self) -> usize {
        worst_case_total(&self.sizes, self.dim, self.m, self.rule, self.t_alloc)
    }

    /// Whether the phase takes the Max-Det branch given its span dimension.
    pub fn uses_max_det(&self, phase: usize, span_dim: usize) -> bool {
        self.rule == BranchRule::MaxDetWhenSparse && span_dim * span_dim < self.size(phase)
    }

    pub fn nominal_branch(&self, phase: usize) -> NominalBranch {
        let s = self.size(phase);
        if self.uses_max_det(phase, self.dim.min(s)) {
            NominalBranch::MaxDet
        } else {
            NominalBranch::Uniform
        }
    }

    /// Pulls per arm in `phase` under the nominal branch.
    pub fn nominal_pulls_per_arm(&self, phase: usize) -> usize {
        let s = self.size(phase);
        match self.nominal_branch(phase) {
            NominalBranch::MaxDet => self.pulls_per_arm(self.dim.min(s)),
            NominalBranch::Uniform => self.pulls_per_arm(s),
        }
    }
}
