//! Seeded random matrices shared by the audits and the generators.

use rand::Rng;

use super::{Matrix, Tolerance};
use crate::error::{Error, Result};

/// Dense matrix with entries drawn uniformly from `[-1, 1]`.
pub(crate) fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Matrix::new(rows, cols, data).expect("positive shape")
}

/// 1-norm condition number, `Rank` error when singular.
pub fn cond1(m: &Matrix) -> Result<f64> {
    let inv = m.inverse(&Tolerance::default())?;
    Ok(m.norm1() * inv.norm1())
}

/// Uniform `n × n` matrix redrawn until its condition number is at most
/// `max_cond`.
pub(crate) fn random_invertible<R: Rng>(
    rng: &mut R,
    n: usize,
    max_cond: f64,
    attempts: usize,
) -> Result<Matrix> {
    for _ in 0..attempts {
        let m = uniform_matrix(rng, n, n);
        if matches!(cond1(&m), Ok(c) if c <= max_cond) {
            return Ok(m);
        }
    }
    Err(Error::Generation(format!(
        "no {n}x{n} matrix with condition number <= {max_cond} in {attempts} draws"
    )))
}
