//! Type H: vanishing cross-block higher derivatives, their irreducibility,
//! and separability of the within-block derivative images.

use super::block_index;
use crate::certificate::{combine_digests, Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::numeric::elim::RowEchelon;
use crate::numeric::Tolerance;
use crate::sparse::BlockSpec;
use crate::tensor::DerivTensor;

fn criterion(n: usize, irreducible: bool) -> Criterion {
    match (n, irreducible) {
        (2, false) => Criterion::TypeH2,
        (3, false) => Criterion::TypeH3,
        (2, true) => Criterion::TypeH2Irreducible,
        _ => Criterion::TypeH3Irreducible,
    }
}

fn validate(t: &DerivTensor, blocks: &BlockSpec, n: usize, tol: &Tolerance) -> Result<()> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidInput(format!("order {n} is not supported (2 or 3)")));
    }
    if t.order() != n {
        return Err(Error::Shape(format!(
            "expected a derivative tensor of order {n}, got order {}",
            t.order()
        )));
    }
    blocks.check_columns(t.in_dim())?;
    t.check_symmetric(tol)
}

fn first_nonzero<'a>(
    t: &DerivTensor,
    thresh: f64,
    indices: impl Iterator<Item = &'a Vec<usize>>,
) -> Option<Witness> {
    for idx in indices {
        for r in 0..t.out_dim() {
            let v = t.get(r, idx);
            if v.abs() > thresh {
                return Some(Witness::TensorEntry {
                    row: r + 1,
                    indices: idx.iter().map(|i| i + 1).collect(),
                    value: v,
                });
            }
        }
    }
    None
}

/// Holds iff every derivative entry whose indices touch two different blocks
/// vanishes. The witness is the first nonzero cross entry.
pub fn check_type_h(t: &DerivTensor, blocks: &BlockSpec, n: usize, tol: &Tolerance) -> Result<Certificate> {
    validate(t, blocks, n, tol)?;
    let all = t.indices();
    let cross = all.iter().filter(|idx| {
        let b0 = blocks.block_of(idx[0]);
        idx.iter().any(|&i| blocks.block_of(i) != b0)
    });
    Ok(match first_nonzero(t, t.threshold(tol), cross) {
        Some(w) => Certificate::new(criterion(n, false), false, w, t.digest()),
        None => Certificate::new(criterion(n, false), true, Witness::None, t.digest()),
    })
}

/// Holds (irreducible) unless the within-block derivative vanishes or some
/// 2-partition of the block's coordinates zeroes every within-block entry
/// that mixes both parts. Only coordinate-aligned splits are searched.
pub fn check_type_h_irreducible(
    t: &DerivTensor,
    blocks: &BlockSpec,
    block: usize,
    n: usize,
    tol: &Tolerance,
) -> Result<Certificate> {
    validate(t, blocks, n, tol)?;
    let b = block_index(blocks, block)?;
    let thresh = t.threshold(tol);
    let range = blocks.range(b);
    let within: Vec<Vec<usize>> = t
        .indices()
        .into_iter()
        .filter(|idx| idx.iter().all(|i| range.contains(i)))
        .collect();
    let cert = |holds, witness| Certificate::new(criterion(n, true), holds, witness, t.digest());
    if first_nonzero(t, thresh, within.iter()).is_none() {
        return Ok(cert(false, Witness::ZeroSlice { block }));
    }
    let cols: Vec<usize> = range.clone().collect();
    let d = cols.len();
    for bits in 0..(1u64 << (d - 1)).saturating_sub(1) {
        let in_first = |c: usize| c == cols[0] || (bits >> (c - cols[1]) & 1 == 1);
        let mixed = within.iter().filter(|idx| {
            let firsts = idx.iter().filter(|&&i| in_first(i)).count();
            firsts > 0 && firsts < idx.len()
        });
        if first_nonzero(t, thresh, mixed).is_none() {
            let (first, second): (Vec<usize>, Vec<usize>) = cols.iter().partition(|&&c| in_first(c));
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
        "splits of block {block} searched over coordinate 2-partitions only"
    )))
}

fn fibers<'a>(t: &'a DerivTensor, keep: impl Fn(&[usize]) -> bool + 'a) -> impl Iterator<Item = Vec<f64>> + 'a {
    t.indices().into_iter().filter(move |idx| keep(idx)).map(move |idx| t.fiber(&idx))
}

fn rank(vectors: &[Vec<f64>], dim: usize, thresh: f64) -> usize {
    RowEchelon::new(vectors.iter().map(|v| v.as_slice()), dim, thresh).rank()
}

/// Holds iff, for every block `i`, the span of the within-block derivative
/// fibers of order `n` meets the span of all competitors (other blocks'
/// within-block fibers of order `n` and every fiber of lower order) only in
/// zero. `tensors[k]` must be the derivative of order `k + 1`. Blocks whose
/// within-block image is zero are reported in the notes.
pub fn check_separability(
    tensors: &[DerivTensor],
    blocks: &BlockSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<Certificate> {
    if !(2..=3).contains(&n) || tensors.len() != n {
        return Err(Error::InvalidInput(format!(
            "separability of order {n} needs derivative tensors of orders 1..={n}, got {}",
            tensors.len()
        )));
    }
    for (k, t) in tensors.iter().enumerate() {
        if t.order() != k + 1 {
            return Err(Error::Shape(format!(
                "tensor {} has order {}, expected {}",
                k + 1,
                t.order(),
                k + 1
            )));
        }
        if t.out_dim() != tensors[0].out_dim() || t.in_dim() != tensors[0].in_dim() {
            return Err(Error::Shape("derivative tensors disagree in dimensions".into()));
        }
        t.check_symmetric(tol)?;
    }
    blocks.check_columns(tensors[0].in_dim())?;
    let dx = tensors[0].out_dim();
    let scale = tensors.iter().map(DerivTensor::max_abs).fold(0.0, f64::max);
    let thresh = tol.threshold(scale);
    let top = &tensors[n - 1];
    let lower: Vec<Vec<f64>> = tensors[..n - 1].iter().flat_map(|t| fibers(t, |_| true)).collect();
    let digest = combine_digests(&tensors.iter().map(DerivTensor::digest).collect::<Vec<_>>());
    let mut degenerate = Vec::new();
    for b in 0..blocks.len() {
        let range = blocks.range(b);
        let own: Vec<Vec<f64>> = fibers(top, |idx| idx.iter().all(|i| range.contains(i))).collect();
        let mut competitors = lower.clone();
        for o in (0..blocks.len()).filter(|&o| o != b) {
            let r = blocks.range(o);
            competitors.extend(fibers(top, move |idx| idx.iter().all(|i| r.contains(i))));
        }
        let image_rank = rank(&own, dx, thresh);
        if image_rank == 0 {
            degenerate.push(b + 1);
            continue;
        }
        let competitor_rank = rank(&competitors, dx, thresh);
        let joint: Vec<Vec<f64>> = own.iter().chain(&competitors).cloned().collect();
        let joint_rank = rank(&joint, dx, thresh);
        if image_rank + competitor_rank != joint_rank {
            return Ok(Certificate::new(
                Criterion::Separability,
                false,
                Witness::Separability {
                    block: b + 1,
                    image_rank,
                    competitor_rank,
                    joint_rank,
                },
                digest,
            ));
        }
    }
    let mut cert = Certificate::new(Criterion::Separability, true, Witness::None, digest);
    if !degenerate.is_empty() {
        cert = cert.with_note(format!(
            "degenerate block(s) {degenerate:?}: zero within-block derivative of order {n}; see the irreducibility check"
        ));
    }
    Ok(cert)
}
