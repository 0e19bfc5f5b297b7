//! Dense matrix primitives with tolerance-aware zero detection.
//!
//! An entry `e` of a matrix `M` counts as zero iff
//! `|e| <= max(abs, rel * max|M|)`. All index sets handed out by this module
//! are one-based and sorted.

mod csv;
pub(crate) mod elim;
mod matrix;
pub(crate) mod random;

use serde::{Deserialize, Serialize};

pub use self::csv::{parse_matrix_csv, write_matrix_csv};
pub use self::matrix::Matrix;
pub use self::random::cond1;
pub(crate) use self::matrix::hex_string;
use crate::error::{Error, Result};

/// Zero classification thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel >= 0.0 && abs >= 0.0 && rel.is_finite() && abs.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be finite and nonnegative (rel={rel}, abs={abs})"
            )));
        }
        Ok(Tolerance { rel, abs })
    }

    /// Purely absolute threshold, used for finite-difference outputs.
    pub fn absolute(abs: f64) -> Result<Self> {
        Tolerance::new(0.0, abs)
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }
}

/// A set of one-based indices drawn from `{1, …, universe}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportMask {
    universe: usize,
    members: Vec<usize>,
}

impl SupportMask {
    pub fn new(universe: usize, mut members: Vec<usize>) -> Result<Self> {
        if universe == 0 {
            return Err(Error::InvalidInput("mask universe must be positive".into()));
        }
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&m| m == 0 || m > universe) {
            return Err(Error::InvalidInput(format!(
                "index {bad} outside 1..={universe}"
            )));
        }
        Ok(SupportMask { universe, members })
    }

    pub(crate) fn from_sorted(universe: usize, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SupportMask { universe, members }
    }

    /// Mask from a bit set where bit `i` stands for index `i + 1`.
    pub fn from_bits(universe: usize, bits: u64) -> Self {
        let members = (0..universe)
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| i + 1)
            .collect();
        SupportMask { universe, members }
    }

    pub fn full(universe: usize) -> Self {
        SupportMask {
            universe,
            members: (1..=universe).collect(),
        }
    }

    pub fn to_bits(&self) -> u64 {
        self.members.iter().fold(0, |acc, m| acc | 1 << (m - 1))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &SupportMask) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }

    pub fn intersection(&self, other: &SupportMask) -> SupportMask {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|m| other.contains(*m))
            .collect();
        SupportMask::from_sorted(self.universe, members)
    }

    pub fn union(&self, other: &SupportMask) -> SupportMask {
        let mut members: Vec<usize> = self.members.iter().chain(&other.members).copied().collect();
        members.sort_unstable();
        members.dedup();
        SupportMask::from_sorted(self.universe.max(other.universe), members)
    }

    pub fn intersects(&self, other: &SupportMask) -> bool {
        self.members.iter().any(|m| other.contains(*m))
    }
}

impl std::fmt::Display for SupportMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Indices of `v` whose magnitude exceeds the tolerance threshold (scaled by
/// `max|v|`).
pub fn support(v: &[f64], tol: &Tolerance) -> Result<SupportMask> {
    if v.is_empty() {
        return Err(Error::InvalidInput("support of an empty vector".into()));
    }
    if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite entry at {}", pos + 1)));
    }
    let scale = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    Ok(support_with_threshold(v, tol.threshold(scale)))
}

pub(crate) fn support_with_threshold(v: &[f64], thresh: f64) -> SupportMask {
    let members = v
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > thresh)
        .map(|(i, _)| i + 1)
        .collect();
    SupportMask::from_sorted(v.len(), members)
}

/// Numerical rank by complete-pivoting elimination.
pub fn rank(m: &Matrix, tol: &Tolerance) -> usize {
    elim::rank_of_rows(&m.row_slices(), m.cols(), m.threshold(tol))
}

/// Row-wise Kronecker product: row `r` of the result is `A[r,:] ⊗ B[r,:]`.
pub fn face_split(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "face-splitting needs equal row counts, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let cols = a.cols() * b.cols();
    let mut data = Vec::with_capacity(a.rows() * cols);
    for r in 0..a.rows() {
        for &x in a.row(r) {
            data.extend(b.row(r).iter().map(|y| x * y));
        }
    }
    Matrix::new(a.rows(), cols, data)
}

pub fn hadamard(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a * b).collect()
}

/// Number of entries classified as nonzero.
pub fn l0_norm(m: &Matrix, tol: &Tolerance) -> usize {
    let thresh = m.threshold(tol);
    m.entries().iter().filter(|x| x.abs() > thresh).count()
}

/// Mutual non-inclusion: neither mask contains the other.
pub fn pitchfork(a: &SupportMask, b: &SupportMask) -> Result<bool> {
    if a.universe() != b.universe() {
        return Err(Error::InvalidInput(format!(
            "masks over different universes ({} vs {})",
            a.universe(),
            b.universe()
        )));
    }
    Ok(!a.is_subset(b) && !b.is_subset(a))
}
