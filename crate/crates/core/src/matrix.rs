//! Small dense matrices (column-major) with the factorizations the Max-Det
//! kernel needs: partially pivoted LU and column-pivoted Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::num::sqrt;
use crate::{Error, Result};

/// Pivots smaller than this multiple of the largest entry count as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Stacks equally long vectors as columns.
    pub fn from_columns<V: AsRef<[f64]>>(columns: &[V]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "columns must have equal length");
            data.extend_from_slice(c);
        }
        Self { rows, cols, data }
    }

    /// Builds from row slices.
    pub fn from_rows<V: AsRef<[f64]>>(rows: &[V]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "rows must have equal length");
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate().take(self.cols) {
            for (o, a) in out.iter_mut().zip(self.column(j)) {
                *o += a * xj;
            }
        }
        out
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(a * self.rows + i, b * self.rows + i);
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    /// LU factorization with partial pivoting, or `None` when a pivot falls
    /// below `PIVOT_TOLERANCE` times the largest entry.
    pub fn lu(&self) -> Result<Option<Lu>> {
        self.require_square()?;
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        if n == 0 {
            return Ok(Some(Lu { a, perm, sign }));
        }
        if scale == 0.0 {
            return Ok(None);
        }
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if a[(p, k)].abs() <= PIVOT_TOLERANCE * scale {
                return Ok(None);
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        let v = a[(k, j)];
                        a[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Some(Lu { a, perm, sign }))
    }

    /// Absolute determinant; exactly zero for numerically singular input.
    pub fn abs_det(&self) -> Result<f64> {
        Ok(self.lu()?.map_or(0.0, |lu| lu.abs_det()))
    }

    /// Solves `self · x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self.lu()? {
            Some(lu) => Ok(lu.solve(b)),
            None => Err(Error::SingularBasis),
        }
    }

    /// Householder QR with column pivoting (largest remaining column norm
    /// first). Stops early once the remaining columns vanish.
    pub fn pivoted_qr(&self) -> PivotedQr {
        let m = self.rows;
        let n = self.cols;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors: Vec<Vec<f64>> = Vec::new();
        let mut diag: Vec<f64> = Vec::new();
        let steps = m.min(n);
        for k in 0..steps {
            // Pivot: column with the largest trailing norm; ties keep the
            // lower position so the original order decides.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let s: f64 = (k..m).map(|i| a[(i, j)] * a[(i, j)]).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            a.swap_columns(k, best);
            perm.swap(k, best);
            let norm = sqrt(best_norm.max(0.0));
            if norm == 0.0 {
                break;
            }
            let alpha = if a[(k, k)] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..m).map(|i| a[(i, k)]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                for j in k..n {
                    let s: f64 = (k..m).map(|i| v[i - k] * a[(i, j)]).sum();
                    let f = 2.0 * s / vnorm2;
                    for i in k..m {
                        a[(i, j)] -= f * v[i - k];
                    }
                }
            }
            diag.push(a[(k, k)]);
            reflectors.push(v);
        }
        PivotedQr { rows: m, r: a, perm, reflectors, diag }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

pub struct Lu {
    a: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn abs_det(&self) -> f64 {
        (0..self.a.rows).map(|k| self.a[(k, k)].abs()).product()
    }

    pub fn det(&self) -> f64 {
        self.sign * (0..self.a.rows).map(|k| self.a[(k, k)]).product::<f64>()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.a.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = x[..i].iter().enumerate().map(|(j, xj)| self.a[(i, j)] * xj).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = x[i + 1..].iter().enumerate().map(|(j, xj)| self.a[(i, i + 1 + j)] * xj).sum();
            x[i] = (x[i] - s) / self.a[(i, i)];
        }
        x
    }
}

/// Result of [`Matrix::pivoted_qr`].
pub struct PivotedQr {
    rows: usize,
    r: Matrix,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    reflectors: Vec<Vec<f64>>,
    /// Diagonal of `R`, nonincreasing in magnitude.
    pub diag: Vec<f64>,
}

impl PivotedQr {
    /// Number of diagonal entries of `R` above `tol · |R_00|`.
    pub fn rank(&self, tol: f64) -> usize {
        let Some(first) = self.diag.first() else { return 0 };
        let cut = tol * first.abs();
        if first.abs() == 0.0 {
            return 0;
        }
        self.diag.iter().take_while(|d| d.abs() > cut).count()
    }

    /// The first `r` columns of `Q`, orthonormal.
    pub fn q_columns(&self, r: usize) -> Vec<Vec<f64>> {
        (0..r)
            .map(|k| {
                let mut e = vec![0.0; self.rows];
                e[k] = 1.0;
                for (j, v) in self.reflectors.iter().enumerate().rev() {
                    let vnorm2: f64 = v.iter().map(|x| x * x).sum();
                    if vnorm2 == 0.0 {
                        continue;
                    }
                    let s: f64 = v.iter().zip(&e[j..]).map(|(a, b)| a * b).sum();
                    let f = 2.0 * s / vnorm2;
                    for (ei, vi) in e[j..].iter_mut().zip(v) {
                        *ei -= f * vi;
                    }
                }
                e
            })
            .collect()
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }
}
