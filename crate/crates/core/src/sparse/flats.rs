//! Enumeration of support classes of a column space.
//!
//! For a row mask `T`, let `N_T = { c : M[row ∉ T, :] c = 0 }`. The vectors of
//! `col(M)` supported inside `T` are exactly `M · N_T`. A mask is *closed*
//! when every row of `T` is outside the row space of the complementary rows;
//! then a generic element of `M · N_T` has support exactly `T`. Closed masks
//! with `dim N_T = 1` are the inclusion-minimal supports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BlockSpec;
use crate::exec::Exec;
use crate::numeric::elim::RowEchelon;
use crate::numeric::{support_with_threshold, Matrix, SupportMask};

#[derive(Clone, Debug)]
pub(crate) struct Flat {
    pub mask: SupportMask,
    pub null_basis: Vec<Vec<f64>>,
    /// Block containing `N_T` when it lies inside a single block's
    /// coordinates; `None` when `N_T` has mixing directions.
    pub pure_block: Option<usize>,
}

impl Flat {
    pub fn dim(&self) -> usize {
        self.null_basis.len()
    }
}

/// Every closed mask with a nontrivial `N_T`, in ascending bit order.
pub(crate) fn closed_masks(
    m: &Matrix,
    thresh: f64,
    blocks: Option<&BlockSpec>,
    exec: Exec,
) -> Vec<Flat> {
    let rows = m.rows();
    let n = m.cols();
    exec.filter_map_range(1..(1usize << rows), |bits| {
        let complement: Vec<&[f64]> = (0..rows)
            .filter(|r| bits >> r & 1 == 0)
            .map(|r| m.row(r))
            .collect();
        let ech = RowEchelon::new(complement.iter().copied(), n, thresh);
        if ech.rank() == n {
            return None;
        }
        if (0..rows)
            .filter(|r| bits >> r & 1 == 1)
            .any(|r| ech.contains(m.row(r)))
        {
            return None;
        }
        let null_basis = ech.null_space();
        let dim = null_basis.len();
        let pure_block = blocks.and_then(|b| {
            (0..b.len()).find(|&i| {
                let range = b.range(i);
                let restricted: Vec<Vec<f64>> =
                    complement.iter().map(|r| r[range.clone()].to_vec()).collect();
                let rank = RowEchelon::new(
                    restricted.iter().map(|r| r.as_slice()),
                    range.len(),
                    thresh,
                )
                .rank();
                range.len() - rank == dim
            })
        });
        Some(Flat {
            mask: SupportMask::from_bits(rows, bits as u64),
            null_basis,
            pure_block,
        })
    })
}

/// A vector of `M · N_T` normalized so its largest-magnitude entry is 1,
/// together with its coefficient vector. Returns `None` when the numerical
/// support does not reproduce the mask.
pub(crate) fn representative(
    m: &Matrix,
    flat: &Flat,
    weights: &[f64],
    rel: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = m.cols();
    let mut coeff = vec![0.0; n];
    for (w, basis) in weights.iter().zip(&flat.null_basis) {
        for (c, b) in coeff.iter_mut().zip(basis) {
            *c += w * b;
        }
    }
    let value = m.apply(&coeff);
    let (imax, vmax) = value
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, v)| (i, *v))?;
    if vmax == 0.0 {
        return None;
    }
    let value: Vec<f64> = value.iter().map(|v| v / vmax).collect();
    let coeff: Vec<f64> = coeff.iter().map(|c| c / vmax).collect();
    let mut value = value;
    value[imax] = 1.0;
    if support_with_threshold(&value, rel) != flat.mask {
        return None;
    }
    Some((value, coeff))
}

/// Generic element of a flat with mixing directions: a seeded random
/// combination of the null basis, redrawn until its coefficients touch at
/// least two blocks and its support is the full mask.
pub(crate) fn generic_mixing(
    m: &Matrix,
    flat: &Flat,
    blocks: &BlockSpec,
    rel: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ flat.mask.to_bits());
    for _ in 0..16 {
        let weights: Vec<f64> = (0..flat.dim())
            .map(|_| {
                let x: f64 = rng.random_range(0.5..1.5);
                if rng.random_bool(0.5) {
                    x
                } else {
                    -x
                }
            })
            .collect();
        if let Some((value, coeff)) = representative(m, flat, &weights, rel) {
            if blocks_touched(&coeff, blocks, rel) >= 2 {
                return Some((value, coeff));
            }
        }
    }
    None
}

/// Number of blocks in which `coeff` has an entry above `rel · max|coeff|`.
pub(crate) fn blocks_touched(coeff: &[f64], blocks: &BlockSpec, rel: f64) -> usize {
    let scale = coeff.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    (0..blocks.len())
        .filter(|&i| coeff[blocks.range(i)].iter().any(|c| c.abs() > rel * scale))
        .count()
}
