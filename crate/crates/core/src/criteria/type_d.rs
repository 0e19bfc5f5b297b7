//! Type D (disjoint supports), its irreducibility, Type O and the
//! compositional contrast.

use super::{block_columns, block_index, cross_pairs};
use crate::certificate::{Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::graph::{finest_row_partition, rank_additive_partitions, RowPartition};
use crate::numeric::elim::l2;
use crate::numeric::{Matrix, Tolerance};
use crate::sparse::BlockSpec;

/// Row cap of the exhaustive split search; larger blocks use the matroid
/// components directly.
const SPLIT_CAP: usize = 16;

/// Holds iff every cross-block column pair has disjoint supports, i.e. a
/// zero Hadamard product. The witness is the first overlapping pair.
pub fn check_type_d(j: &Matrix, blocks: &BlockSpec, tol: &Tolerance) -> Result<Certificate> {
    blocks.check_columns(j.cols())?;
    let supports = j.column_supports(tol);
    for (a, b) in cross_pairs(blocks) {
        let common = supports[a].intersection(&supports[b]);
        if !common.is_empty() {
            return Ok(Certificate::new(
                Criterion::TypeD,
                false,
                Witness::ColumnPair {
                    columns: [a + 1, b + 1],
                    rows: common.members().to_vec(),
                },
                j.digest(),
            ));
        }
    }
    Ok(Certificate::new(Criterion::TypeD, true, Witness::None, j.digest()))
}

/// Holds (irreducible) iff the block's columns admit no rank-additive row
/// 2-partition. One-dimensional blocks with a nonzero column are
/// irreducible.
pub fn check_type_d_irreducible(
    j: &Matrix,
    blocks: &BlockSpec,
    block: usize,
    tol: &Tolerance,
) -> Result<Certificate> {
    blocks.check_columns(j.cols())?;
    let b = block_index(blocks, block)?;
    let sub = block_columns(j, blocks, b)?;
    let thresh = j.threshold(tol);
    for c in 0..sub.cols() {
        if (0..sub.rows()).all(|r| sub.get(r, c).abs() <= thresh) {
            return Err(Error::DegenerateColumn {
                column: blocks.range(b).start + c + 1,
            });
        }
    }
    let cert = |holds, witness| Certificate::new(Criterion::TypeDIrreducible, holds, witness, j.digest());
    if sub.cols() == 1 {
        return Ok(cert(true, Witness::None).with_note(format!("block {block} is one-dimensional")));
    }
    // thresholds are taken from the whole Jacobian so supports match check_type_d
    let sub_tol = Tolerance::absolute(thresh)?;
    let (split, note) = if sub.rows() <= SPLIT_CAP {
        let parts = rank_additive_partitions(&sub, 2, &sub_tol, SPLIT_CAP)?;
        (
            parts.into_iter().next(),
            format!("exhaustive search over row 2-partitions of block {block}"),
        )
    } else {
        let finest = finest_row_partition(&sub, &sub_tol)?;
        let split = if finest.len() > 1 {
            // merge everything but the first component into one group
            let first = finest.groups()[0].clone();
            let rest = finest.groups()[2..]
                .iter()
                .fold(finest.groups()[1].clone(), |acc, g| acc.union(g));
            Some(RowPartition::new(vec![first, rest])?)
        } else {
            None
        };
        (
            split,
            format!("row-matroid components of block {block} ({} rows exceed the exhaustive cap)", sub.rows()),
        )
    };
    Ok(match split {
        Some(p) => cert(false, Witness::RowSplit { groups: p.to_lists() }),
        None => cert(true, Witness::None),
    }
    .with_note(note))
}

/// Holds iff all cross-block column pairs are orthogonal. An inner product
/// counts as zero when it is at most `max(abs, rel·‖a‖·‖b‖)`.
pub fn check_type_o(j: &Matrix, blocks: &BlockSpec, tol: &Tolerance) -> Result<Certificate> {
    blocks.check_columns(j.cols())?;
    let cols: Vec<Vec<f64>> = (0..j.cols()).map(|c| j.column(c)).collect();
    for (a, b) in cross_pairs(blocks) {
        let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
        if dot.abs() > tol.threshold(l2(&cols[a]) * l2(&cols[b])) {
            return Ok(Certificate::new(
                Criterion::TypeO,
                false,
                Witness::InnerProduct {
                    columns: [a + 1, b + 1],
                    value: dot,
                },
                j.digest(),
            ));
        }
    }
    Ok(Certificate::new(Criterion::TypeO, true, Witness::None, j.digest()))
}

/// `Σ_rows Σ_{i<j} ‖J[r, block i]‖₂ · ‖J[r, block j]‖₂`.
///
/// This row-wise surrogate follows the compositional contrast of earlier
/// work on compositional generalization; it vanishes exactly when every row
/// touches at most one block.
pub fn compositional_contrast(j: &Matrix, blocks: &BlockSpec) -> Result<f64> {
    blocks.check_columns(j.cols())?;
    let mut total = 0.0;
    for r in 0..j.rows() {
        let row = j.row(r);
        let norms: Vec<f64> = (0..blocks.len()).map(|b| l2(&row[blocks.range(b)])).collect();
        for a in 0..norms.len() {
            for b in a + 1..norms.len() {
                total += norms[a] * norms[b];
            }
        }
    }
    Ok(total)
}
