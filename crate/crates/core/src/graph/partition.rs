//! Row partitions `[m] = Q_1 ∪ … ∪ Q_K` with
//! `rank(A) = Σ rank(A[Q_k, :])`.
//!
//! Two independent routes are provided: exhaustive 2-splitting (capped) and
//! the connected components of the row matroid computed from fundamental
//! circuits (uncapped). Zero rows are loops of the matroid; they are placed in
//! the group holding the smallest nonzero row.

use serde::{Deserialize, Serialize};

use super::UnionFind;
use crate::error::{Error, Result};
use crate::numeric::elim::RowEchelon;
use crate::numeric::{Matrix, SupportMask, Tolerance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowPartition {
    groups: Vec<SupportMask>,
}

impl RowPartition {
    /// Checks that the groups are nonempty, disjoint and cover every row.
    pub fn new(groups: Vec<SupportMask>) -> Result<Self> {
        let universe = groups.first().map_or(0, |g| g.universe());
        let mut seen = vec![false; universe];
        for g in &groups {
            if g.universe() != universe || g.is_empty() {
                return Err(Error::InvalidInput("groups must be nonempty over one universe".into()));
            }
            for &r in g.members() {
                if std::mem::replace(&mut seen[r - 1], true) {
                    return Err(Error::InvalidInput(format!("row {r} appears twice")));
                }
            }
        }
        if seen.contains(&false) {
            return Err(Error::InvalidInput("groups do not cover every row".into()));
        }
        Ok(RowPartition { groups })
    }

    pub fn groups(&self) -> &[SupportMask] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// One-based row lists, for witnesses.
    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|g| g.members().to_vec()).collect()
    }

    /// Group index of a one-based row.
    pub fn group_of(&self, row: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(row))
            .expect("partition covers every row")
    }
}

fn rank_rows(m: &Matrix, rows: &[usize], thresh: f64) -> usize {
    RowEchelon::new(rows.iter().map(|&r| m.row(r)), m.cols(), thresh).rank()
}

fn check_full_column_rank(m: &Matrix, thresh: f64) -> Result<()> {
    let rank = RowEchelon::new(m.row_slices(), m.cols(), thresh).rank();
    if rank < m.cols() {
        return Err(Error::Rank(format!("column rank {rank} < {}", m.cols())));
    }
    Ok(())
}

/// Every rank-additive split of `rows` (zero-based, all nonzero) into two
/// nonempty groups, the first holding `rows[0]`. With `first_only` the
/// search stops at the first hit.
fn two_splits(m: &Matrix, rows: &[usize], thresh: f64, first_only: bool) -> Vec<(Vec<usize>, Vec<usize>)> {
    let p = rows.len();
    let mut out = Vec::new();
    if p < 2 {
        return out;
    }
    let total = rank_rows(m, rows, thresh);
    for bits in 0..(1u64 << (p - 1)) - 1 {
        let mut a = vec![rows[0]];
        let mut b = Vec::new();
        for (t, &r) in rows[1..].iter().enumerate() {
            if bits >> t & 1 == 1 {
                a.push(r);
            } else {
                b.push(r);
            }
        }
        if rank_rows(m, &a, thresh) + rank_rows(m, &b, thresh) == total {
            out.push((a, b));
            if first_only {
                break;
            }
        }
    }
    out
}

/// Recursive exhaustive refinement of `rows` (zero-based, all nonzero) into
/// groups with no further rank-additive split, ordered by smallest member.
pub(crate) fn refine_rows(m: &Matrix, rows: &[usize], thresh: f64) -> Vec<Vec<usize>> {
    let mut out = match two_splits(m, rows, thresh, true).pop() {
        Some((a, b)) => {
            let mut v = refine_rows(m, &a, thresh);
            v.extend(refine_rows(m, &b, thresh));
            v
        }
        None => vec![rows.to_vec()],
    };
    out.sort_by_key(|g| g[0]);
    out
}

/// Adds the zero rows to the group holding the smallest nonzero row and
/// converts to a one-based partition ordered by smallest member.
fn assemble(total_rows: usize, mut groups: Vec<Vec<usize>>, zero_rows: &[usize]) -> RowPartition {
    if let Some(first) = groups.iter_mut().min_by_key(|g| g.iter().min().copied()) {
        first.extend_from_slice(zero_rows);
    } else {
        groups.push(zero_rows.to_vec());
    }
    let mut masks: Vec<SupportMask> = groups
        .into_iter()
        .map(|g| SupportMask::new(total_rows, g.into_iter().map(|r| r + 1).collect()).expect("rows in range"))
        .collect();
    masks.sort_by_key(|g| g.members()[0]);
    RowPartition { groups: masks }
}

fn split_zero_rows(m: &Matrix, thresh: f64) -> (Vec<usize>, Vec<usize>) {
    (0..m.rows()).partition(|&r| !m.is_zero_row(r, thresh))
}

/// For `parts == 2`, every rank-additive row 2-partition (both groups of
/// rank at least one) in enumeration order. For `parts > 2`, the finest
/// partition reached by recursive splitting, if it has at least `parts`
/// groups.
pub fn rank_additive_partitions(
    m: &Matrix,
    parts: usize,
    tol: &Tolerance,
    cap: usize,
) -> Result<Vec<RowPartition>> {
    if parts == 0 {
        return Err(Error::InvalidInput("a partition needs at least one part".into()));
    }
    if m.rows() > cap || m.rows() > 63 {
        return Err(Error::Size(format!(
            "{} rows exceed the partition search cap of {cap}",
            m.rows()
        )));
    }
    let thresh = m.threshold(tol);
    check_full_column_rank(m, thresh)?;
    let (nonzero, zero) = split_zero_rows(m, thresh);
    Ok(match parts {
        1 => vec![assemble(m.rows(), vec![nonzero], &zero)],
        2 => two_splits(m, &nonzero, thresh, false)
            .into_iter()
            .map(|(a, b)| assemble(m.rows(), vec![a, b], &zero))
            .collect(),
        _ => {
            let finest = refine_rows(m, &nonzero, thresh);
            if finest.len() >= parts {
                vec![assemble(m.rows(), finest, &zero)]
            } else {
                Vec::new()
            }
        }
    })
}

/// Finest rank-additive row partition, as the connected components of the
/// row matroid: a greedy row basis is chosen and each remaining row is
/// joined with the basis rows appearing in its expansion.
pub fn finest_row_partition(m: &Matrix, tol: &Tolerance) -> Result<RowPartition> {
    let thresh = m.threshold(tol);
    check_full_column_rank(m, thresh)?;
    let (nonzero, zero) = split_zero_rows(m, thresh);
    let n = m.cols();
    let mut basis: Vec<usize> = Vec::with_capacity(n);
    for &r in &nonzero {
        if basis.len() == n {
            break;
        }
        let mut trial = basis.clone();
        trial.push(r);
        if rank_rows(m, &trial, thresh) == trial.len() {
            basis = trial;
        }
    }
    let inv = m.select_rows(&basis)?.inverse(&Tolerance::default())?;
    let mut uf = UnionFind::new(m.rows());
    for &r in &nonzero {
        if basis.contains(&r) {
            continue;
        }
        // coefficients x with xᵀ · A[basis, :] = A[r, :]
        let x: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|c| m.get(r, c) * inv.get(c, k)).sum())
            .collect();
        let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let cut = tol.threshold(scale);
        for (k, &b) in basis.iter().enumerate() {
            if x[k].abs() > cut {
                uf.union(r, b);
            }
        }
    }
    let groups: Vec<Vec<usize>> = uf
        .classes()
        .into_iter()
        .filter(|c| !m.is_zero_row(c[0], thresh))
        .collect();
    Ok(assemble(m.rows(), groups, &zero))
}
