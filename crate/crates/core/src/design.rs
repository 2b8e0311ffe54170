//! G-optimal experimental design by Frank–Wolfe (Fedorov–Wynn) iterations.
//!
//! For weights `π` on the vectors `x_i` let `V(π) = Σ π_i x_i x_iᵀ`. The
//! G-optimal design minimizes `max_i x_iᵀ V(π)⁻¹ x_i`; by the
//! Kiefer–Wolfowitz equivalence theorem the optimum equals `d` and
//! coincides with the D-optimal design, so each iteration moves mass toward
//! the vector of largest leverage with the exact D-optimal line search.

use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::num::dot;
use crate::{Error, Result};

pub const DESIGN_TOLERANCE: f64 = 1e-3;
pub const DESIGN_MAX_ITERATIONS: usize = 10_000;
/// Weights below this are dropped before allocating pulls.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    pub weights: Vec<f64>,
    pub max_leverage: f64,
    pub iterations: usize,
    pub dim: usize,
}

fn information_matrix<V: AsRef<[f64]>>(vectors: &[V], weights: &[f64], dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for (x, &w) in vectors.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let x = x.as_ref();
        for a in 0..dim {
            for b in 0..dim {
                m[(a, b)] += w * x[a] * x[b];
            }
        }
    }
    m
}

/// `x_iᵀ V(π)⁻¹ x_i` for every vector.
pub fn leverages<V: AsRef<[f64]>>(vectors: &[V], weights: &[f64]) -> Result<Vec<f64>> {
    let dim = vectors.first().map_or(0, |v| v.as_ref().len());
    let lu = information_matrix(vectors, weights, dim).lu()?.ok_or(Error::SingularGram)?;
    Ok(vectors.iter().map(|x| dot(x.as_ref(), &lu.solve(x.as_ref()))).collect())
}

pub fn g_optimal_design<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Design> {
    g_optimal_design_with(vectors, DESIGN_TOLERANCE, DESIGN_MAX_ITERATIONS)
}

/// Runs from the uniform design until `max leverage ≤ d·(1 + tolerance)` or
/// `max_iterations` steps. The vectors must span their ambient space.
pub fn g_optimal_design_with<V: AsRef<[f64]>>(
    vectors: &[V],
    tolerance: f64,
    max_iterations: usize,
) -> Result<Design> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, |v| v.as_ref().len());
    if n == 0 || dim == 0 {
        return Err(Error::SingularGram);
    }
    let d = dim as f64;
    let mut weights = alloc::vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        let lev = leverages(vectors, &weights)?;
        let mut j = 0;
        for (i, &l) in lev.iter().enumerate() {
            if l > lev[j] {
                j = i;
            }
        }
        let top = lev[j];
        if top <= d * (1.0 + tolerance) || iterations >= max_iterations {
            return Ok(Design { weights, max_leverage: top, iterations, dim });
        }
        let step = (top / d - 1.0) / (top - 1.0);
        for w in weights.iter_mut() {
            *w *= 1.0 - step;
        }
        weights[j] += step;
        iterations += 1;
    }
}

impl Design {
    /// Weights with entries below `threshold` removed and the rest
    /// renormalized. Falls back to the full design if pruning would make the
    /// information matrix singular.
    pub fn pruned<V: AsRef<[f64]>>(&self, vectors: &[V], threshold: f64) -> Vec<f64> {
        let mut w: Vec<f64> = self.weights.iter().map(|&x| if x < threshold { 0.0 } else { x }).collect();
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return self.weights.clone();
        }
        for x in w.iter_mut() {
            *x /= total;
        }
        match leverages(vectors, &w) {
            Ok(_) => w,
            Err(_) => self.weights.clone(),
        }
    }
}
