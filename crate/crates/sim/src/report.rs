//! Hardness report: `H_BAI`, `H_pri`, `H` and the DP-BAI error bound.

use std::fmt;

use dpbai_core::schedule::phase_schedule;
use dpbai_core::{Hardness, Instance};

use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct HardnessReport {
    pub hardness: Hardness,
    pub budget: usize,
    pub t_prime: i64,
    pub phases: usize,
    /// `T'/(65·M·H)`.
    pub exponent: f64,
    /// `exp(−exponent)`.
    pub bound: f64,
}

pub fn hardness_report(instance: &Instance, budget: usize) -> Result<HardnessReport> {
    let hardness = instance.hardness()?;
    let sched = phase_schedule(instance.arms(), instance.dim(), budget)?;
    let exponent = sched.t_prime as f64 / (65.0 * sched.m as f64 * hardness.h);
    Ok(HardnessReport {
        hardness,
        budget,
        t_prime: sched.t_prime,
        phases: sched.m,
        exponent,
        bound: hardness.error_bound(sched.t_prime, sched.m),
    })
}

impl fmt::Display for HardnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H_BAI     {}", self.hardness.h_bai)?;
        writeln!(f, "H_pri     {}", self.hardness.h_pri)?;
        writeln!(f, "H         {}", self.hardness.h)?;
        writeln!(f, "T         {}", self.budget)?;
        writeln!(f, "T'        {}", self.t_prime)?;
        writeln!(f, "M         {}", self.phases)?;
        writeln!(f, "exponent  {}", self.exponent)?;
        write!(f, "bound     {}", self.bound)
    }
}
