//! Derivative tensors `D^n g_s` of order 1 to 3, stored row-major with the
//! output coordinate first: `dims = [d_x, d_s, …, d_s]`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::{hex_string, Matrix, Tolerance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor", into = "RawTensor")]
pub struct DerivTensor {
    dims: Vec<usize>,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTensor {
    dims: Vec<usize>,
    entries: Vec<f64>,
}

impl TryFrom<RawTensor> for DerivTensor {
    type Error = Error;
    fn try_from(raw: RawTensor) -> Result<Self> {
        DerivTensor::new(raw.dims, raw.entries)
    }
}

impl From<DerivTensor> for RawTensor {
    fn from(t: DerivTensor) -> Self {
        RawTensor {
            dims: t.dims,
            entries: t.entries,
        }
    }
}

impl DerivTensor {
    pub fn new(dims: Vec<usize>, entries: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&dims.len()) {
            return Err(Error::Shape(format!(
                "derivative tensors have 2 to 4 dimensions, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Shape(format!("zero dimension in {dims:?}")));
        }
        if dims[2..].iter().any(|&d| d != dims[1]) {
            return Err(Error::Shape(format!(
                "derivative dimensions must agree, got {dims:?}"
            )));
        }
        let len: usize = dims.iter().product();
        if entries.len() != len {
            return Err(Error::Shape(format!(
                "dims {dims:?} need {len} entries, got {}",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry at flat index {i}")));
        }
        Ok(DerivTensor { dims, entries })
    }

    pub fn zeros(out_dim: usize, in_dim: usize, order: usize) -> Result<Self> {
        let mut dims = vec![out_dim];
        dims.extend(std::iter::repeat_n(in_dim, order));
        let len = dims.iter().product();
        DerivTensor::new(dims, vec![0.0; len])
    }

    /// The Jacobian viewed as an order-1 tensor.
    pub fn from_matrix(j: &Matrix) -> Self {
        DerivTensor {
            dims: vec![j.rows(), j.cols()],
            entries: j.entries().to_vec(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn out_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn in_dim(&self) -> usize {
        self.dims[1]
    }

    fn offset(&self, row: usize, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        idx.iter().fold(row, |acc, &i| acc * self.in_dim() + i)
    }

    /// Entry at zero-based output `row` and derivative indices `idx`.
    pub fn get(&self, row: usize, idx: &[usize]) -> f64 {
        self.entries[self.offset(row, idx)]
    }

    pub fn set(&mut self, row: usize, idx: &[usize], value: f64) {
        let o = self.offset(row, idx);
        self.entries[o] = value;
    }

    /// The output vector `T[:, idx]`.
    pub fn fiber(&self, idx: &[usize]) -> Vec<f64> {
        (0..self.out_dim()).map(|r| self.get(r, idx)).collect()
    }

    /// Every derivative multi-index in row-major order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let d = self.in_dim();
        let count = d.pow(self.order() as u32);
        (0..count)
            .map(|mut flat| {
                let mut idx = vec![0; self.order()];
                for slot in idx.iter_mut().rev() {
                    *slot = flat % d;
                    flat /= d;
                }
                idx
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, e| a.max(e.abs()))
    }

    pub fn threshold(&self, tol: &Tolerance) -> f64 {
        tol.threshold(self.max_abs())
    }

    /// Fails when two permutations of a derivative index differ by more than
    /// the tolerance threshold.
    pub fn check_symmetric(&self, tol: &Tolerance) -> Result<()> {
        let thresh = self.threshold(tol);
        for idx in self.indices() {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            if sorted == idx {
                continue;
            }
            for r in 0..self.out_dim() {
                let a = self.get(r, &idx);
                let b = self.get(r, &sorted);
                if (a - b).abs() > thresh {
                    return Err(Error::InvalidInput(format!(
                        "tensor not symmetric at row {}, indices {:?}: {a} vs {b}",
                        r + 1,
                        idx.iter().map(|i| i + 1).collect::<Vec<_>>()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dims.len() as u64).to_le_bytes());
        for d in &self.dims {
            h.update((*d as u64).to_le_bytes());
        }
        for e in &self.entries {
            h.update(e.to_le_bytes());
        }
        hex_string(&h.finalize())
    }
}
