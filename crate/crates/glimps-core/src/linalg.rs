//! Dense real linear algebra: row restriction, least squares via
//! Householder QR with column pivoting, subspace projection, and the
//! projection-ratio statistic used by the greedy stage.

use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::index_set::IndexSet;
use crate::{Error, Result};

/// Relative threshold on factorization diagonals deciding numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Every entry must be finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from explicit rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Read-only view of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            out.push(dot(self.row(i), v.as_slice()));
        }
        Vector::new(out)
    }

    /// Restriction to the rows named by `idx` (zero-based), in order.
    pub fn restrict_rows(&self, idx: &IndexSet) -> Result<Matrix> {
        if idx.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(max) = idx.max() {
            if max >= self.rows {
                return Err(Error::IndexOutOfRange { index: max, limit: self.rows });
            }
        }
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for i in idx.iter() {
            data.extend_from_slice(self.row(i));
        }
        Ok(Matrix { rows: idx.len(), cols: self.cols, data })
    }
}

/// Dense vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { data })
    }

    pub fn from_slice(data: &[f64]) -> Result<Self> {
        Self::new(data.to_vec())
    }

    pub fn zeros(len: usize) -> Self {
        Self { data: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: f64) {
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        float::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// Max-abs norm.
    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &v| acc.max(float::abs(v)))
    }

    /// Restriction to the coordinates named by `idx` (zero-based).
    pub fn restrict(&self, idx: &IndexSet) -> Result<Vector> {
        if idx.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(max) = idx.max() {
            if max >= self.data.len() {
                return Err(Error::IndexOutOfRange { index: max, limit: self.data.len() });
            }
        }
        Ok(Vector { data: idx.iter().map(|i| self.data[i]).collect() })
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector { data: self.data.iter().map(|v| c * v).collect() }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR factorization with column pivoting of a tall matrix.
///
/// Stores the reflectors below the diagonal of `qr`, the `R` factor on
/// and above it, and the column permutation. Numerical rank is decided
/// at `RANK_TOL` times the largest diagonal magnitude of `R`.
#[derive(Debug, Clone)]
pub struct QrFactorization {
    qr: Matrix,
    tau: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl QrFactorization {
    /// Factorizes `a`, which must be at least as tall as it is wide.
    pub fn new(a: &Matrix) -> Result<Self> {
        let m = a.rows();
        let n = a.cols();
        if m < n {
            return Err(Error::DimensionMismatch { expected: n, got: m });
        }
        let mut qr = a.clone();
        let mut tau = vec![0.0; n];
        let mut perm: Vec<usize> = (0..n).collect();
        // Squared column norms for pivot selection, recomputed from the
        // trailing block each step to dodge cancellation drift.
        for k in 0..n {
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let mut s = 0.0;
                for i in k..m {
                    let v = qr.get(i, j);
                    s += v * v;
                }
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = qr.get(i, k);
                    qr.set(i, k, qr.get(i, best));
                    qr.set(i, best, t);
                }
                perm.swap(k, best);
            }
            // Householder reflector for column k.
            let mut norm_x = 0.0;
            for i in k..m {
                let v = qr.get(i, k);
                norm_x += v * v;
            }
            norm_x = float::sqrt(norm_x);
            if norm_x == 0.0 {
                tau[k] = 0.0;
                continue;
            }
            let x0 = qr.get(k, k);
            let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
            let v0 = x0 - alpha;
            // v = [v0, x_{k+1..m}]; normalize so v[0] = 1.
            tau[k] = -v0 / alpha;
            let inv_v0 = 1.0 / v0;
            for i in (k + 1)..m {
                qr.set(i, k, qr.get(i, k) * inv_v0);
            }
            qr.set(k, k, alpha);
            // Apply (I - tau v v^T) to the trailing columns.
            for j in (k + 1)..n {
                let mut s = qr.get(k, j);
                for i in (k + 1)..m {
                    s += qr.get(i, k) * qr.get(i, j);
                }
                s *= tau[k];
                qr.set(k, j, qr.get(k, j) - s);
                for i in (k + 1)..m {
                    qr.set(i, j, qr.get(i, j) - s * qr.get(i, k));
                }
            }
        }
        let largest = (0..n).map(|k| float::abs(qr.get(k, k))).fold(0.0, f64::max);
        let tol = RANK_TOL * largest;
        let mut rank = 0;
        for k in 0..n {
            if float::abs(qr.get(k, k)) > tol && largest > 0.0 {
                rank += 1;
            } else {
                break;
            }
        }
        Ok(Self { qr, tau, perm, rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.qr.cols()
    }

    /// Ratio of the largest to smallest diagonal magnitude of `R`; a
    /// cheap condition estimate for generic-position guards.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.qr.cols();
        let largest = (0..n).map(|k| float::abs(self.qr.get(k, k))).fold(0.0, f64::max);
        let smallest = (0..n).map(|k| float::abs(self.qr.get(k, k))).fold(f64::INFINITY, f64::min);
        if smallest == 0.0 {
            f64::INFINITY
        } else {
            largest / smallest
        }
    }

    /// Applies `Q^T` to `b` in place (length `m`).
    fn apply_qt(&self, b: &mut [f64]) {
        let m = self.qr.rows();
        let n = self.qr.cols();
        for k in 0..n {
            if self.tau[k] == 0.0 {
                continue;
            }
            let mut s = b[k];
            for i in (k + 1)..m {
                s += self.qr.get(i, k) * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in (k + 1)..m {
                b[i] -= s * self.qr.get(i, k);
            }
        }
    }

    /// Least-squares solution of `a x = b`; requires full column rank.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        let m = self.qr.rows();
        let n = self.qr.cols();
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: b.len() });
        }
        if !self.is_full_rank() {
            return Err(Error::RankDeficient { rank: self.rank, cols: n });
        }
        let mut y = b.as_slice().to_vec();
        self.apply_qt(&mut y);
        // Back substitution on R.
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in (k + 1)..n {
                s -= self.qr.get(k, j) * z[j];
            }
            z[k] = s / self.qr.get(k, k);
        }
        // Undo the column permutation.
        let mut x = vec![0.0; n];
        for k in 0..n {
            x[self.perm[k]] = z[k];
        }
        Vector::new(x)
    }
}

/// Least-squares fit `argmin_theta ||a theta - b||` by Householder QR.
///
/// Errors with [`Error::RankDeficient`] when `a` does not have full
/// column rank at the `RANK_TOL` threshold.
pub fn least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    QrFactorization::new(a)?.solve(b)
}

/// Orthogonal projection of `v` onto the column space of `u`.
pub fn project_onto_subspace(u: &Matrix, v: &Vector) -> Result<Vector> {
    let theta = least_squares(u, v)?;
    u.mul_vec(&theta)
}

/// `||P_u v|| / ||v||`, the fraction of `v`'s energy inside the subspace.
pub fn projection_ratio(u: &Matrix, v: &Vector) -> Result<f64> {
    let denom = v.norm();
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    let projected = project_onto_subspace(u, v)?;
    Ok(projected.norm() / denom)
}
