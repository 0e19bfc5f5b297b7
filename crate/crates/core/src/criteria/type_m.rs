//! Type M: mutual non-inclusion of cross-block column supports.

use super::{block_index, cross_pairs};
use crate::certificate::{Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::numeric::{Matrix, SupportMask, Tolerance};
use crate::sparse::BlockSpec;

/// Largest block whose column 2-partitions are enumerated.
const MAX_BLOCK_DIM: usize = 16;

fn nonempty_supports(j: &Matrix, tol: &Tolerance) -> Result<Vec<SupportMask>> {
    let supports = j.column_supports(tol);
    match supports.iter().position(|s| s.is_empty()) {
        Some(c) => Err(Error::DegenerateColumn { column: c + 1 }),
        None => Ok(supports),
    }
}

fn containment(a: usize, b: usize, supports: &[SupportMask]) -> Option<Witness> {
    let (small, large) = if supports[a].is_subset(&supports[b]) {
        (a, b)
    } else if supports[b].is_subset(&supports[a]) {
        (b, a)
    } else {
        return None;
    };
    Some(Witness::Containment {
        smaller: small + 1,
        larger: large + 1,
        smaller_support: supports[small].members().to_vec(),
        larger_support: supports[large].members().to_vec(),
    })
}

/// Holds iff no cross-block column support contains another. The witness is
/// the first offending pair, oriented from the contained support. A zero
/// column is a `DegenerateColumn` error.
pub fn check_type_m(j: &Matrix, blocks: &BlockSpec, tol: &Tolerance) -> Result<Certificate> {
    blocks.check_columns(j.cols())?;
    let supports = nonempty_supports(j, tol)?;
    for (a, b) in cross_pairs(blocks) {
        if let Some(w) = containment(a, b, &supports) {
            return Ok(Certificate::new(Criterion::TypeM, false, w, j.digest()));
        }
    }
    Ok(Certificate::new(Criterion::TypeM, true, Witness::None, j.digest())
        .with_note("evaluated in the standard basis"))
}

/// Type M through row supports: with `C_r` the columns nonzero in row `r`
/// and `R_k` the support of column `k`, it holds iff `⋂_{r∈R_k} C_r` lies
/// inside the block of `k` for every column `k`. Agrees with
/// [`check_type_m`] on every input.
pub fn type_m_by_row_intersections(j: &Matrix, blocks: &BlockSpec, tol: &Tolerance) -> Result<bool> {
    blocks.check_columns(j.cols())?;
    let supports = nonempty_supports(j, tol)?;
    let row_supports: Vec<SupportMask> = (0..j.rows()).map(|r| j.row_support(r, tol)).collect();
    for (k, rows) in supports.iter().enumerate() {
        let common = rows
            .members()
            .iter()
            .map(|&r| row_supports[r - 1].clone())
            .reduce(|acc, s| acc.intersection(&s))
            .expect("support is nonempty");
        if common.members().iter().any(|&c| blocks.block_of(c - 1) != blocks.block_of(k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Holds (irreducible) iff no 2-partition of the block's columns has every
/// cross pair mutually non-included. One-dimensional blocks are irreducible.
pub fn check_type_m_irreducible(
    j: &Matrix,
    blocks: &BlockSpec,
    block: usize,
    tol: &Tolerance,
) -> Result<Certificate> {
    blocks.check_columns(j.cols())?;
    let b = block_index(blocks, block)?;
    let supports = nonempty_supports(j, tol)?;
    let cols: Vec<usize> = blocks.range(b).collect();
    let d = cols.len();
    let cert = |holds, witness| Certificate::new(Criterion::TypeMIrreducible, holds, witness, j.digest());
    if d == 1 {
        return Ok(cert(true, Witness::None).with_note(format!("block {block} is one-dimensional")));
    }
    if d > MAX_BLOCK_DIM {
        return Err(Error::Size(format!(
            "block {block} has {d} columns, the partition search handles at most {MAX_BLOCK_DIM}"
        )));
    }
    // the first column is fixed in the first part
    for bits in 0..(1u32 << (d - 1)) - 1 {
        let (mut first, mut second) = (vec![cols[0]], Vec::new());
        for (t, &c) in cols[1..].iter().enumerate() {
            if bits >> t & 1 == 1 {
                first.push(c);
            } else {
                second.push(c);
            }
        }
        let splits = first
            .iter()
            .all(|&a| second.iter().all(|&c| containment(a, c, &supports).is_none()));
        if splits {
            return Ok(cert(
                false,
                Witness::ColumnSplit {
                    first: first.iter().map(|c| c + 1).collect(),
                    second: second.iter().map(|c| c + 1).collect(),
                },
            ));
        }
    }
    Ok(cert(true, Witness::None).with_note(format!(
        "all {} column 2-partitions of block {block} checked",
        (1u32 << (d - 1)) - 1
    )))
}
