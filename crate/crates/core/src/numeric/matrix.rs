use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{SupportMask, Tolerance};
use crate::error::{Error, Result};

/// Dense real matrix stored row-major. Always at least 1×1 with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.entries)
    }
}

impl From<Matrix> for RawMatrix {
    fn from(m: Matrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data,
        }
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    /// Builds a matrix from columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map(|c| c.as_ref().len()).unwrap_or(0);
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::Shape(format!(
                    "column {} has {} entries, expected {rows}",
                    j + 1,
                    c.len()
                )));
            }
            for (i, &x) in c.iter().enumerate() {
                data[i * cols + j] = x;
            }
        }
        Matrix::new(rows, cols, data)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
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

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Zero-based access.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_slices(&self) -> Vec<&[f64]> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// Zero threshold for entries of this matrix.
    pub fn threshold(&self, tol: &Tolerance) -> f64 {
        tol.threshold(self.max_abs())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    /// `self · x` for a coefficient vector `x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Column submatrix for zero-based indices.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::Shape(format!(
                "invalid column selection {cols:?} for {} columns",
                self.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        Matrix::new(self.rows, cols.len(), data)
    }

    /// Row submatrix for zero-based indices.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        if rows.is_empty() || rows.iter().any(|&r| r >= self.rows) {
            return Err(Error::Shape(format!(
                "invalid row selection {rows:?} for {} rows",
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix::new(rows.len(), self.cols, data)
    }

    /// Support of column `c` (zero-based) under the matrix-wide threshold.
    pub fn column_support(&self, c: usize, tol: &Tolerance) -> SupportMask {
        let thresh = self.threshold(tol);
        let members = (0..self.rows)
            .filter(|&r| self.get(r, c).abs() > thresh)
            .map(|r| r + 1)
            .collect();
        SupportMask::from_sorted(self.rows, members)
    }

    pub fn column_supports(&self, tol: &Tolerance) -> Vec<SupportMask> {
        (0..self.cols).map(|c| self.column_support(c, tol)).collect()
    }

    /// Support of row `r` (zero-based) as one-based column indices.
    pub fn row_support(&self, r: usize, tol: &Tolerance) -> SupportMask {
        let thresh = self.threshold(tol);
        let members = (0..self.cols)
            .filter(|&c| self.get(r, c).abs() > thresh)
            .map(|c| c + 1)
            .collect();
        SupportMask::from_sorted(self.cols, members)
    }

    pub fn is_zero_row(&self, r: usize, thresh: f64) -> bool {
        self.row(r).iter().all(|x| x.abs() <= thresh)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self, tol: &Tolerance) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let thresh = self.threshold(tol);
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .expect("non-empty pivot range");
            if a[p * n + k].abs() <= thresh {
                return Err(Error::Rank(format!("matrix is singular (pivot {})", k + 1)));
            }
            if p != k {
                for c in 0..n {
                    a.swap(p * n + c, k * n + c);
                    inv.swap(p * n + c, k * n + c);
                }
            }
            let pivot = a[k * n + k];
            for c in 0..n {
                a[k * n + c] /= pivot;
                inv[k * n + c] /= pivot;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a[r * n + k];
                if f == 0.0 {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] -= f * a[k * n + c];
                    inv[r * n + c] -= f * inv[k * n + c];
                }
            }
        }
        Matrix::new(n, n, inv)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Content hash of the shape and entry bytes, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.rows as u64).to_le_bytes());
        h.update((self.cols as u64).to_le_bytes());
        for x in &self.data {
            h.update(x.to_le_bytes());
        }
        hex_string(&h.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| format!("{x}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
