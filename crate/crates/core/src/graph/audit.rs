//! Cross-checked block structure of a full-column-rank matrix `A`.
//!
//! The number of blocks `K` is computed four ways and the results must agree:
//!
//! 1. the finest rank-additive row partition by exhaustive splitting;
//! 2. the same partition from row-matroid components;
//! 3. a basis `B` built from the null spaces of the complementary rows, such
//!    that `A·B` is block diagonal after a row permutation, with irreducible
//!    diagonal blocks;
//! 4. the components of the `D` graph of `A·B`, each an irreducible
//!    mechanism.
//!
//! The maximum number of `D`-graph components over all invertible mixings is
//! audited by sampling: no draw may exceed `K`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::partition::refine_rows;
use super::{build_graph, components, finest_row_partition, GraphKind, RowPartition};
use crate::certificate::{Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::elim::RowEchelon;
use crate::numeric::random::random_invertible;
use crate::numeric::{Matrix, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditOptions {
    /// Random invertible mixings drawn for the component-count audit.
    pub draws: usize,
    pub seed: u64,
    /// Row cap of the exhaustive partition search.
    pub cap: usize,
    pub exec: Exec,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            draws: 200,
            seed: 0xa10,
            cap: 16,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockStructure {
    pub count: usize,
    pub partition: RowPartition,
    /// One-based rows listed group by group.
    pub row_order: Vec<usize>,
    pub block_dims: Vec<usize>,
    /// Columns grouped by block; `A·basis` is block diagonal.
    pub basis: Matrix,
    pub sampled_max: usize,
}

fn internal(what: &str) -> Error {
    Error::Internal(format!("block-structure characterizations disagree: {what}"))
}

fn d_components(m: &Matrix, tol: &Tolerance) -> Result<Vec<Vec<usize>>> {
    Ok(components(&build_graph(m, GraphKind::D, tol)?))
}

/// Whether the nonzero rows of `m` admit no rank-additive split.
fn unsplittable(m: &Matrix, tol: &Tolerance) -> bool {
    let thresh = m.threshold(tol);
    let rows: Vec<usize> = (0..m.rows()).filter(|&r| !m.is_zero_row(r, thresh)).collect();
    refine_rows(m, &rows, thresh).len() == 1
}

pub fn block_structure(m: &Matrix, tol: &Tolerance, opts: AuditOptions) -> Result<BlockStructure> {
    if m.rows() > opts.cap || m.rows() > 63 {
        return Err(Error::Size(format!(
            "{} rows exceed the partition search cap of {}",
            m.rows(),
            opts.cap
        )));
    }
    let n = m.cols();
    let partition = finest_row_partition(m, tol)?;
    let thresh = m.threshold(tol);
    let nonzero: Vec<usize> = (0..m.rows()).filter(|&r| !m.is_zero_row(r, thresh)).collect();
    let exhaustive = refine_rows(m, &nonzero, thresh);
    let mut nonzero_groups: Vec<Vec<usize>> = partition
        .groups()
        .iter()
        .map(|g| g.members().iter().map(|r| r - 1).filter(|r| nonzero.contains(r)).collect())
        .collect();
    nonzero_groups.sort_by_key(|g| g[0]);
    if nonzero_groups != exhaustive {
        return Err(internal("exhaustive splitting and matroid components"));
    }
    let k = partition.len();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut block_dims = Vec::with_capacity(k);
    for g in partition.groups() {
        let outside: Vec<&[f64]> = (0..m.rows())
            .filter(|r| !g.contains(r + 1))
            .map(|r| m.row(r))
            .collect();
        let null = RowEchelon::new(outside, n, thresh).null_space();
        block_dims.push(null.len());
        columns.extend(null);
    }
    if columns.len() != n {
        return Err(internal("complementary null spaces do not sum to the column count"));
    }
    let basis = Matrix::from_columns(&columns)?;
    if basis.inverse(tol).is_err() {
        return Err(internal("block basis is singular"));
    }
    let c = m.matmul(&basis)?;
    let c_thresh = c.threshold(tol);
    let mut start = 0;
    for (g, &d) in partition.groups().iter().zip(&block_dims) {
        for r in (0..m.rows()).filter(|r| !g.contains(r + 1)) {
            if (start..start + d).any(|col| c.get(r, col).abs() > c_thresh) {
                return Err(internal("mixed matrix is not block diagonal"));
            }
        }
        let rows: Vec<usize> = g.members().iter().map(|r| r - 1).collect();
        let cols: Vec<usize> = (start..start + d).collect();
        let diag = c.select_rows(&rows)?.select_columns(&cols)?;
        if !unsplittable(&diag, tol) {
            return Err(internal("a diagonal block splits further"));
        }
        start += d;
    }

    let mechanisms = d_components(&c, tol)?;
    if mechanisms.len() != k {
        return Err(internal("mechanism count differs from the partition size"));
    }
    for comp in &mechanisms {
        let cols: Vec<usize> = comp.iter().map(|v| v - 1).collect();
        let sub = c.select_columns(&cols)?;
        let rows: Vec<usize> = (0..m.rows()).filter(|&r| !sub.is_zero_row(r, c_thresh)).collect();
        if !unsplittable(&sub.select_rows(&rows)?, tol) {
            return Err(internal("a mechanism is reducible"));
        }
    }

    let counts = opts.exec.map_range(0..opts.draws, |d| -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(d as u64));
        let mix = match d % 3 {
            0 => random_invertible(&mut rng, n, 1e6, 100)?,
            _ => {
                let mut r = Matrix::zeros(n, n);
                let mut off = 0;
                for &dim in &block_dims {
                    let blk = random_invertible(&mut rng, dim, 1e6, 100)?;
                    for i in 0..dim {
                        for j in 0..dim {
                            r.set(off + i, off + j, blk.get(i, j));
                        }
                    }
                    off += dim;
                }
                let mut mix = basis.matmul(&r)?;
                if d % 3 == 2 {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.shuffle(&mut rng);
                    mix = mix.select_columns(&perm)?;
                }
                mix
            }
        };
        Ok(d_components(&m.matmul(&mix)?, tol)?.len())
    });
    let mut sampled_max = 0;
    for c in counts {
        sampled_max = sampled_max.max(c?);
    }
    if sampled_max > k {
        return Err(internal("a random mixing has more components than the partition"));
    }

    let row_order = partition.groups().iter().flat_map(|g| g.members().iter().copied()).collect();
    Ok(BlockStructure {
        count: k,
        partition,
        row_order,
        block_dims,
        basis,
        sampled_max,
    })
}

/// Certificate that `M` has exactly `k` blocks.
pub fn block_count_audit(m: &Matrix, k: usize, tol: &Tolerance) -> Result<Certificate> {
    block_count_audit_with(m, k, tol, AuditOptions::default())
}

pub fn block_count_audit_with(
    m: &Matrix,
    k: usize,
    tol: &Tolerance,
    opts: AuditOptions,
) -> Result<Certificate> {
    let s = block_structure(m, tol, opts)?;
    let notes = [
        format!(
            "exhaustive splitting, matroid components, block diagonalization and D-graph mechanisms all give {} block(s)",
            s.count
        ),
        format!(
            "{} random invertible mixings (seed {}) reached at most {} component(s); the constructed basis reaches {}",
            opts.draws, opts.seed, s.sampled_max, s.count
        ),
    ];
    let basis_rows = (0..s.basis.rows()).map(|r| s.basis.row(r).to_vec()).collect();
    let mut cert = Certificate::new(
        Criterion::BlockStructure,
        s.count == k,
        Witness::BlockStructure {
            count: s.count,
            row_groups: s.partition.to_lists(),
            row_order: s.row_order,
            basis: basis_rows,
            sampled_max: s.sampled_max,
        },
        m.digest(),
    );
    for n in notes {
        cert = cert.with_note(n);
    }
    if s.count != k {
        cert = cert.with_note(format!("expected {k} block(s)"));
    }
    Ok(cert)
}
