//! Max-Det subset selection and per-phase dimensionality reduction.
//!
//! A Max-Det collection of a finite set `A ⊂ R^{d'}` is a subset of `d'`
//! vectors whose stacked matrix has the largest absolute determinant among
//! all such subsets. When `A` spans `R^{d'}`, every member of `A` has
//! coordinates of magnitude at most one in that basis (Cramer's rule plus
//! maximality), which is what keeps reconstructed means well conditioned.

use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::num::{dot, norm};
use crate::{Error, Result};

/// Singular values below this multiple of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Largest number of candidate subsets enumerated exhaustively.
pub const EXACT_SUBSET_LIMIT: u64 = 100_000;

const SWAP_GAIN: f64 = 1e-9;
const TIE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxDetOptions {
    pub exact_limit: u64,
    pub rank_tolerance: f64,
}

impl Default for MaxDetOptions {
    fn default() -> Self {
        Self { exact_limit: EXACT_SUBSET_LIMIT, rank_tolerance: RANK_TOLERANCE }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxDetCollection {
    /// Positions of the selected vectors in the input slice, ascending.
    pub indices: Vec<usize>,
    pub det_abs: f64,
    /// Selected vectors as columns, in `indices` order.
    pub basis: Matrix,
    /// True when the subset came from exhaustive enumeration.
    pub certified: bool,
}

/// `|det|` of a square matrix.
pub fn abs_det(matrix: &Matrix) -> Result<f64> {
    matrix.abs_det()
}

/// Number of ways to choose `k` of `n`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

pub fn max_det_collection<V: AsRef<[f64]>>(vectors: &[V], d_prime: usize) -> Result<MaxDetCollection> {
    max_det_collection_with(vectors, d_prime, &MaxDetOptions::default())
}

/// Exhaustive search when at most `exact_limit` subsets exist, otherwise a
/// swap local search started from a pivoted-QR column selection.
pub fn max_det_collection_with<V: AsRef<[f64]>>(
    vectors: &[V],
    d_prime: usize,
    options: &MaxDetOptions,
) -> Result<MaxDetCollection> {
    for (arm, v) in vectors.iter().enumerate() {
        if v.as_ref().len() != d_prime {
            return Err(Error::DimensionMismatch { arm, expected: d_prime, got: v.as_ref().len() });
        }
    }
    let all = Matrix::from_columns(vectors);
    let qr = all.pivoted_qr();
    let rank = if vectors.is_empty() { 0 } else { qr.rank(options.rank_tolerance) };
    if vectors.len() < d_prime || rank < d_prime {
        return Err(Error::RankDeficient { rank, needed: d_prime });
    }
    if binomial(vectors.len(), d_prime) <= options.exact_limit {
        return Ok(exhaustive(vectors, d_prime));
    }
    let mut start: Vec<usize> = qr.perm[..d_prime].to_vec();
    start.sort_unstable();
    Ok(local_search(vectors, &all, start))
}

fn subset_matrix<V: AsRef<[f64]>>(vectors: &[V], indices: &[usize]) -> Matrix {
    let cols: Vec<&[f64]> = indices.iter().map(|&i| vectors[i].as_ref()).collect();
    Matrix::from_columns(&cols)
}

fn exhaustive<V: AsRef<[f64]>>(vectors: &[V], d_prime: usize) -> MaxDetCollection {
    let n = vectors.len();
    let mut combo: Vec<usize> = (0..d_prime).collect();
    let mut best = combo.clone();
    let mut best_det = -1.0;
    loop {
        let det = subset_matrix(vectors, &combo).abs_det().unwrap_or(0.0);
        if det > best_det * (1.0 + TIE_SLACK) {
            best_det = det;
            best.clone_from(&combo);
        }
        // Next combination in lexicographic order.
        let mut i = d_prime;
        loop {
            if i == 0 {
                let basis = subset_matrix(vectors, &best);
                return MaxDetCollection { indices: best, det_abs: best_det, basis, certified: true };
            }
            i -= 1;
            if combo[i] < n - d_prime + i {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..d_prime {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

fn local_search<V: AsRef<[f64]>>(vectors: &[V], all: &Matrix, mut chosen: Vec<usize>) -> MaxDetCollection {
    let n = vectors.len();
    let d = chosen.len();
    let max_rounds = 1000 * d.max(1);
    for _ in 0..max_rounds {
        let Ok(Some(lu)) = subset_matrix(vectors, &chosen).lu() else { break };
        // Replacing basis column k by vector j scales |det| by |coord_k(j)|.
        let mut swap: Option<(usize, usize, f64)> = None;
        for j in 0..n {
            if chosen.binary_search(&j).is_ok() {
                continue;
            }
            let coords = lu.solve(all.column(j));
            for (k, c) in coords.iter().enumerate() {
                let gain = c.abs();
                if gain > 1.0 + SWAP_GAIN && swap.is_none_or(|(_, _, g)| gain > g) {
                    swap = Some((k, j, gain));
                }
            }
        }
        let Some((k, j, _)) = swap else { break };
        chosen[k] = j;
        chosen.sort_unstable();
    }
    let basis = subset_matrix(vectors, &chosen);
    let det_abs = basis.abs_det().unwrap_or(0.0);
    MaxDetCollection { indices: chosen, det_abs, basis, certified: false }
}

/// Coordinates `α` of `target` in the collection's basis.
pub fn coordinates_in_basis(target: &[f64], collection: &MaxDetCollection) -> Result<Vec<f64>> {
    if collection.det_abs <= 0.0 {
        return Err(Error::SingularBasis);
    }
    collection.basis.solve(target)
}

/// Coordinates of a vector set in an orthonormal basis of its span.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedArms {
    /// Reduced vectors, in input order, each of length `dim`.
    pub vectors: Vec<Vec<f64>>,
    /// Orthonormal basis vectors in the input space.
    pub basis: Vec<Vec<f64>>,
    pub dim: usize,
}

impl ReducedArms {
    /// Maps a reduced coordinate vector back to the input space.
    pub fn lift(&self, coords: &[f64]) -> Vec<f64> {
        let ambient = self.basis.first().map_or(0, Vec::len);
        let mut out = alloc::vec![0.0; ambient];
        for (c, u) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(u) {
                *o += c * x;
            }
        }
        out
    }
}

pub fn reduce_dimension<V: AsRef<[f64]>>(vectors: &[V]) -> ReducedArms {
    reduce_dimension_with(vectors, RANK_TOLERANCE)
}

/// Orthonormal basis from a column-pivoted QR of the vectors stacked in
/// input order; `dim` is the numerical rank at `tolerance`.
pub fn reduce_dimension_with<V: AsRef<[f64]>>(vectors: &[V], tolerance: f64) -> ReducedArms {
    if vectors.is_empty() {
        return ReducedArms { vectors: Vec::new(), basis: Vec::new(), dim: 0 };
    }
    let qr = Matrix::from_columns(vectors).pivoted_qr();
    let dim = qr.rank(tolerance);
    let basis = qr.q_columns(dim);
    let reduced = vectors
        .iter()
        .map(|v| basis.iter().map(|u| dot(u, v.as_ref())).collect())
        .collect();
    ReducedArms { vectors: reduced, basis, dim }
}

/// Residual of `basis · α - target` relative to `1 + ‖target‖`.
pub fn relative_residual(basis: &Matrix, alpha: &[f64], target: &[f64]) -> f64 {
    let fitted = basis.mul_vec(alpha);
    let diff: Vec<f64> = fitted.iter().zip(target).map(|(a, b)| a - b).collect();
    norm(&diff) / (1.0 + norm(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn symmetric_tie_picks_smallest_indices() {
        let v = [vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let c = max_det_collection(&v, 2).unwrap();
        assert_eq!(c.indices, vec![0, 1]);
        assert!((c.det_abs - 1.0).abs() < 1e-12);
        assert!(c.certified);
    }

    #[test]
    fn rank_deficient_input_fails() {
        let v = [vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(max_det_collection(&v, 2), Err(Error::RankDeficient { rank: 1, needed: 2 }));
        let too_few = [vec![1.0, 0.0]];
        assert!(max_det_collection(&too_few, 2).is_err());
    }

    #[test]
    fn self_coordinates_are_unit_vectors() {
        let v = [vec![2.0, 1.0], vec![0.0, 3.0], vec![1.0, 1.0]];
        let c = max_det_collection(&v, 2).unwrap();
        for (slot, &i) in c.indices.iter().enumerate() {
            let a = coordinates_in_basis(&v[i], &c).unwrap();
            for (k, x) in a.iter().enumerate() {
                let want = if k == slot { 1.0 } else { 0.0 };
                assert!((x - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn local_search_reaches_unit_coordinate_bound() {
        // Force the heuristic path on a small set.
        let v: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let t = i as f64 * 0.37;
                vec![libm::cos(t) * (1.0 + 0.1 * i as f64), libm::sin(t), 0.3 * (i % 3) as f64]
            })
            .collect();
        let opts = MaxDetOptions { exact_limit: 0, ..MaxDetOptions::default() };
        let heur = max_det_collection_with(&v, 3, &opts).unwrap();
        assert!(!heur.certified);
        for a in &v {
            for x in coordinates_in_basis(a, &heur).unwrap() {
                assert!(x.abs() <= 1.0 + 1e-8);
            }
        }
        let exact = max_det_collection(&v, 3).unwrap();
        assert!(heur.det_abs <= exact.det_abs * (1.0 + 1e-12));
    }

    #[test]
    fn rank_one_reduction() {
        let r = reduce_dimension(&[vec![2.0, 0.0], vec![4.0, 0.0], vec![6.0, 0.0]]);
        assert_eq!(r.dim, 1);
        let s = r.vectors[0][0] / 2.0;
        assert!((s.abs() - 1.0).abs() < 1e-12);
        for (v, want) in r.vectors.iter().zip([2.0, 4.0, 6.0]) {
            assert!((v[0] - want * s).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_inputs_keep_inner_products() {
        let v = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let r = reduce_dimension(&v);
        assert_eq!(r.dim, 2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((dot(&r.vectors[i], &r.vectors[j]) - dot(&v[i], &v[j])).abs() < 1e-9);
            }
        }
        let back = r.lift(&r.vectors[1]);
        assert!((back[1] - 1.0).abs() < 1e-12 && back[0].abs() < 1e-12);
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(binomial(30, 2), 435);
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10_000, 16), u64::MAX);
    }
}
