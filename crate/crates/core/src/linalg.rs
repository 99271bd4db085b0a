//! Dense binary constraint matrices and the few linear-algebra kernels the
//! dual methods need.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};

/// Row-major `m x n` matrix with small integer entries.
///
/// Valid problems only hold 0/1 entries; other values are representable so
/// that validation can report them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len("matrix row", cols, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(size: usize) -> Self {
        let mut data = vec![0; size * size];
        for k in 0..size {
            data[k * size + k] = 1;
        }
        Self {
            rows: size,
            cols: size,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("primal vector", self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| f64::from(a) * xi)
                    .sum()
            })
            .collect())
    }

    /// `A^T y`
    pub fn tmul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("dual vector", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (j, &yj) in y.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(j)) {
                *o += f64::from(a) * yj;
            }
        }
        Ok(out)
    }

    /// Number of ones in each column, i.e. `A^T e_m`.
    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for j in 0..self.rows {
            for (s, &a) in sums.iter_mut().zip(self.row(j)) {
                *s += u64::from(a);
            }
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|j| self.row(j).iter().map(|&a| u64::from(a)).sum())
            .collect()
    }

    /// `A A^T e_m` in exact integer arithmetic: `sum_i A_ji * colsum_i`.
    pub fn row_weights(&self) -> Vec<u64> {
        let col_sums = self.col_sums();
        (0..self.rows)
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(&col_sums)
                    .map(|(&a, &s)| u64::from(a) * s)
                    .sum()
            })
            .collect()
    }

    /// The `n x n` Gram matrix `A^T A`.
    pub fn gram(&self) -> SymMatrix {
        let n = self.cols;
        let mut data = vec![0.0; n * n];
        for j in 0..self.rows {
            let row = self.row(j);
            for (i, &ai) in row.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                for (k, &ak) in row.iter().enumerate() {
                    data[i * n + k] += f64::from(ai) * f64::from(ak);
                }
            }
        }
        SymMatrix { size: n, data }
    }
}

/// Dense symmetric matrix, row-major, full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(size: usize, data: Vec<f64>) -> Result<Self> {
        check_len("symmetric matrix data", size * size, data.len())?;
        Ok(Self { size, data })
    }

    pub fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for k in 0..size {
            data[k * size + k] = 1.0;
        }
        Self { size, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    fn mul_into(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.data[r * self.size..(r + 1) * self.size]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum();
        }
    }
}

pub const POWER_ITERATION_TOLERANCE: f64 = 1e-10;
pub const POWER_ITERATION_MAX_STEPS: u64 = 100_000;

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
///
/// Power iteration from the all-ones vector; stops once the Rayleigh quotient
/// changes by at most `1e-10` relative. For non-negative matrices the Perron
/// vector is non-negative, so the start vector always has a component along it.
pub fn spectral_radius(matrix: &SymMatrix) -> Result<f64> {
    let n = matrix.size();
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = vec![1.0 / libm::sqrt(n as f64); n];
    let mut w = vec![0.0; n];
    let mut estimate = 0.0;
    for step in 1..=POWER_ITERATION_MAX_STEPS {
        matrix.mul_into(&v, &mut w);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = norm2(&w);
        if norm == 0.0 {
            // v lies in the kernel; for a PSD matrix with a non-negative start this means A = 0.
            return Ok(0.0);
        }
        if step > 1 && (rayleigh - estimate).abs() <= POWER_ITERATION_TOLERANCE * rayleigh.abs() {
            return Ok(rayleigh);
        }
        estimate = rayleigh;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    Err(Error::NonConvergence {
        what: "power iteration",
        iterations: POWER_ITERATION_MAX_STEPS,
        residual: estimate,
    })
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|a| a * a).sum::<f64>())
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
