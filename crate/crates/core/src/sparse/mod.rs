//! Exact desk-scale machinery for sparsest bases of a column space.
//!
//! Everything here is an exhaustive search over row masks (`2^rows`), so the
//! entry points refuse inputs with more than [`SearchOptions::cap`] rows or
//! [`SearchOptions::max_cols`] columns instead of approximating.
//!
//! * [`minimal_supports`] lists the inclusion-minimal supports of `col(M)`,
//!   one representative vector each.
//! * [`sparsest_basis`] runs the matroid greedy over those vectors, optionally
//!   restricted to block-pure vectors or forced to contain a mixing vector.
//! * [`sparsity_gap`] compares the two (`ρ⁺ < ρ⁻`).

mod flats;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use self::flats::{closed_masks, generic_mixing, representative, Flat};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::elim::{RowEchelon, SpanTracker, INDEPENDENCE_REL};
use crate::numeric::{Matrix, SupportMask, Tolerance};

/// Partition of the columns into contiguous blocks of the given sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBlocks", into = "RawBlocks")]
pub struct BlockSpec {
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawBlocks {
    dims: Vec<usize>,
}

impl TryFrom<RawBlocks> for BlockSpec {
    type Error = Error;
    fn try_from(raw: RawBlocks) -> Result<Self> {
        BlockSpec::new(raw.dims)
    }
}

impl From<BlockSpec> for RawBlocks {
    fn from(b: BlockSpec) -> Self {
        RawBlocks { dims: b.dims }
    }
}

impl BlockSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "block sizes must be a nonempty list of positive integers, got {dims:?}"
            )));
        }
        Ok(BlockSpec { dims })
    }

    pub fn uniform(count: usize, dim: usize) -> Result<Self> {
        BlockSpec::new(vec![dim; count])
    }

    /// Parses a comma list such as `3,3,3`.
    pub fn parse(text: &str) -> Result<Self> {
        let dims = text
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidInput(format!("invalid block size {:?} in {text:?}", t.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlockSpec::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Zero-based column range of block `i` (zero-based).
    pub fn range(&self, i: usize) -> Range<usize> {
        let start: usize = self.dims[..i].iter().sum();
        start..start + self.dims[i]
    }

    /// One-based column indices of block `i`.
    pub fn columns(&self, i: usize) -> Vec<usize> {
        self.range(i).map(|c| c + 1).collect()
    }

    /// Block owning the zero-based column `col`.
    pub fn block_of(&self, col: usize) -> usize {
        let mut end = 0;
        for (i, d) in self.dims.iter().enumerate() {
            end += d;
            if col < end {
                return i;
            }
        }
        panic!("column {col} outside the block spec");
    }

    pub fn check_columns(&self, cols: usize) -> Result<()> {
        if self.total() != cols {
            return Err(Error::Shape(format!(
                "blocks {:?} cover {} columns, matrix has {cols}",
                self.dims,
                self.total()
            )));
        }
        Ok(())
    }

    /// Zero-based columns of the listed blocks, in block order.
    pub fn columns_of(&self, blocks: &[usize]) -> Vec<usize> {
        blocks.iter().flat_map(|&b| self.range(b)).collect()
    }

    /// Spec covering only the listed blocks.
    pub fn restrict(&self, blocks: &[usize]) -> BlockSpec {
        BlockSpec {
            dims: blocks.iter().map(|&b| self.dims[b]).collect(),
        }
    }
}

impl std::fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A vector of the column space with its coefficients and support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubspaceVector {
    pub value: Vec<f64>,
    pub coeff: Vec<f64>,
    pub support: SupportMask,
    pub support_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSearchResult {
    pub cost: usize,
    pub vectors: Vec<SubspaceVector>,
    /// Per vector: whether its coefficients span two or more blocks.
    pub mixing: Vec<bool>,
}

impl BasisSearchResult {
    /// Coefficient matrix with the basis vectors as columns.
    pub fn coefficient_matrix(&self) -> Matrix {
        let cols: Vec<&[f64]> = self.vectors.iter().map(|v| v.coeff.as_slice()).collect();
        Matrix::from_columns(&cols).expect("basis is nonempty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BasisMode {
    Unconstrained,
    BlockRespecting,
    ForceMixing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of rows (masks are enumerated exhaustively).
    pub cap: usize,
    pub max_cols: usize,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: 20,
            max_cols: 8,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SparsityGap {
    pub rho_plus: usize,
    pub rho_minus: usize,
    pub independent: bool,
    pub respecting: BasisSearchResult,
    pub mixing: BasisSearchResult,
}

#[derive(Clone, Debug)]
struct Candidate {
    vector: SubspaceVector,
    pure_block: Option<usize>,
}

/// Checked view of a full-column-rank matrix within the enumeration limits.
struct Space<'a> {
    m: &'a Matrix,
    thresh: f64,
    vec_thresh: f64,
    opts: SearchOptions,
}

impl<'a> Space<'a> {
    fn new(m: &'a Matrix, tol: &Tolerance, opts: SearchOptions) -> Result<Self> {
        Space::with_threshold(m, m.threshold(tol), tol, opts)
    }

    fn with_threshold(m: &'a Matrix, thresh: f64, tol: &Tolerance, opts: SearchOptions) -> Result<Self> {
        if m.rows() > opts.cap || m.rows() > 63 {
            return Err(Error::Size(format!(
                "{} rows exceed the enumeration cap of {}",
                m.rows(),
                opts.cap
            )));
        }
        if m.cols() > opts.max_cols {
            return Err(Error::Size(format!(
                "{} columns exceed the limit of {}",
                m.cols(),
                opts.max_cols
            )));
        }
        let rank = RowEchelon::new(m.row_slices(), m.cols(), thresh).rank();
        if rank < m.cols() {
            return Err(Error::Rank(format!(
                "column rank {rank} < {} columns",
                m.cols()
            )));
        }
        Ok(Space {
            m,
            thresh,
            vec_thresh: tol.threshold(1.0),
            opts,
        })
    }

    fn flats(&self, blocks: Option<&BlockSpec>) -> Vec<Flat> {
        closed_masks(self.m, self.thresh, blocks, self.opts.exec)
    }

    fn elementary(&self, flats: &[Flat]) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = flats
            .iter()
            .filter(|f| f.dim() == 1)
            .filter_map(|f| {
                let (value, coeff) = representative(self.m, f, &[1.0], self.vec_thresh)?;
                Some(Candidate {
                    vector: SubspaceVector {
                        value,
                        coeff,
                        support_size: f.mask.len(),
                        support: f.mask.clone(),
                    },
                    pure_block: f.pure_block,
                })
            })
            .collect();
        sort_candidates(&mut out);
        out
    }
}

fn sort_candidates(c: &mut [Candidate]) {
    c.sort_by(|a, b| {
        (a.vector.support_size, &a.vector.support, a.pure_block.is_none()).cmp(&(
            b.vector.support_size,
            &b.vector.support,
            b.pure_block.is_none(),
        ))
    });
}

/// Extends `tracker` greedily with the cheapest independent candidates until
/// it spans `target` dimensions.
fn greedy<'c>(
    tracker: &mut SpanTracker,
    candidates: &'c [Candidate],
    target: usize,
) -> Vec<&'c Candidate> {
    let mut picked = Vec::new();
    for c in candidates {
        if tracker.dim() == target {
            break;
        }
        if tracker.insert(&c.vector.coeff) {
            picked.push(c);
        }
    }
    picked
}

fn result_from(picked: Vec<(SubspaceVector, bool)>) -> BasisSearchResult {
    let cost = picked.iter().map(|(v, _)| v.support_size).sum();
    let (vectors, mixing) = picked.into_iter().unzip();
    BasisSearchResult {
        cost,
        vectors,
        mixing,
    }
}

/// Whether a nonzero vector of `col(M)` supported inside `mask` exists.
pub fn achievable(m: &Matrix, mask: &SupportMask, tol: &Tolerance) -> Result<bool> {
    if mask.universe() != m.rows() {
        return Err(Error::Shape(format!(
            "mask over {} rows for a matrix with {} rows",
            mask.universe(),
            m.rows()
        )));
    }
    let thresh = m.threshold(tol);
    let rank = RowEchelon::new(m.row_slices(), m.cols(), thresh).rank();
    if rank < m.cols() {
        return Err(Error::Rank(format!("column rank {rank} < {}", m.cols())));
    }
    let outside: Vec<&[f64]> = (0..m.rows())
        .filter(|r| !mask.contains(r + 1))
        .map(|r| m.row(r))
        .collect();
    Ok(RowEchelon::new(outside, m.cols(), thresh).rank() < m.cols())
}

/// All inclusion-minimal achievable supports, sorted by size then mask.
pub fn minimal_supports(m: &Matrix, tol: &Tolerance, cap: usize) -> Result<Vec<SubspaceVector>> {
    minimal_supports_with(
        m,
        tol,
        SearchOptions {
            cap,
            ..SearchOptions::default()
        },
    )
}

pub fn minimal_supports_with(
    m: &Matrix,
    tol: &Tolerance,
    opts: SearchOptions,
) -> Result<Vec<SubspaceVector>> {
    let space = Space::new(m, tol, opts)?;
    let flats = space.flats(None);
    Ok(space.elementary(&flats).into_iter().map(|c| c.vector).collect())
}

pub fn sparsest_basis(
    m: &Matrix,
    blocks: &BlockSpec,
    mode: BasisMode,
    tol: &Tolerance,
) -> Result<BasisSearchResult> {
    sparsest_basis_with(m, blocks, mode, tol, SearchOptions::default())
}

pub fn sparsest_basis_with(
    m: &Matrix,
    blocks: &BlockSpec,
    mode: BasisMode,
    tol: &Tolerance,
    opts: SearchOptions,
) -> Result<BasisSearchResult> {
    blocks.check_columns(m.cols())?;
    let space = Space::new(m, tol, opts)?;
    match mode {
        BasisMode::Unconstrained => {
            let flats = space.flats(Some(blocks));
            Ok(unconstrained(&space, &flats))
        }
        BasisMode::BlockRespecting => block_respecting(&space, blocks, tol),
        BasisMode::ForceMixing => {
            let flats = space.flats(Some(blocks));
            force_mixing(&space, blocks, &flats)
        }
    }
}

fn unconstrained(space: &Space, flats: &[Flat]) -> BasisSearchResult {
    let elems = space.elementary(flats);
    let mut tracker = SpanTracker::new(INDEPENDENCE_REL);
    let picked = greedy(&mut tracker, &elems, space.m.cols());
    result_from(
        picked
            .into_iter()
            .map(|c| (c.vector.clone(), c.pure_block.is_none()))
            .collect(),
    )
}

/// Per block: sparsest basis of the block's own column space, embedded back
/// into full coefficient vectors.
fn block_respecting(space: &Space, blocks: &BlockSpec, tol: &Tolerance) -> Result<BasisSearchResult> {
    let n = space.m.cols();
    let mut picked = Vec::with_capacity(n);
    for b in 0..blocks.len() {
        let range = blocks.range(b);
        let cols: Vec<usize> = range.clone().collect();
        let sub = space.m.select_columns(&cols)?;
        let sub_space = Space::with_threshold(&sub, space.thresh, tol, space.opts)?;
        let flats = sub_space.flats(None);
        let elems = sub_space.elementary(&flats);
        let mut tracker = SpanTracker::new(INDEPENDENCE_REL);
        let chosen = greedy(&mut tracker, &elems, cols.len());
        if chosen.len() != cols.len() {
            return Err(Error::Infeasible(format!(
                "block {} spans only {} of {} dimensions with minimal-support vectors",
                b + 1,
                chosen.len(),
                cols.len()
            )));
        }
        for c in chosen {
            let mut coeff = vec![0.0; n];
            coeff[range.clone()].copy_from_slice(&c.vector.coeff);
            picked.push((
                SubspaceVector {
                    coeff,
                    ..c.vector.clone()
                },
                false,
            ));
        }
    }
    Ok(result_from(picked))
}

/// Cheapest basis containing at least one mixing vector. Each support class
/// whose vectors include mixing directions is forced in turn through a
/// generic representative, then completed greedily.
fn force_mixing(space: &Space, blocks: &BlockSpec, flats: &[Flat]) -> Result<BasisSearchResult> {
    if blocks.len() < 2 {
        return Err(Error::Infeasible(
            "a mixing basis needs at least two blocks".into(),
        ));
    }
    let n = space.m.cols();
    let elems = space.elementary(flats);
    let min_elem = elems.first().map(|c| c.vector.support_size).unwrap_or(0);
    let mut classes: Vec<&Flat> = flats.iter().filter(|f| f.pure_block.is_none()).collect();
    classes.sort_by(|a, b| (a.mask.len(), &a.mask).cmp(&(b.mask.len(), &b.mask)));

    let mut best: Option<BasisSearchResult> = None;
    for flat in classes {
        if let Some(b) = &best {
            if flat.mask.len() + (n - 1) * min_elem >= b.cost {
                break;
            }
        }
        let Some((value, coeff)) = generic_mixing(space.m, flat, blocks, space.vec_thresh) else {
            continue;
        };
        let mut tracker = SpanTracker::new(INDEPENDENCE_REL);
        if !tracker.insert(&coeff) {
            continue;
        }
        let rest = greedy(&mut tracker, &elems, n);
        if tracker.dim() != n {
            continue;
        }
        let forced = SubspaceVector {
            value,
            coeff,
            support_size: flat.mask.len(),
            support: flat.mask.clone(),
        };
        let mut picked = vec![(forced, true)];
        picked.extend(
            rest.into_iter()
                .map(|c| (c.vector.clone(), c.pure_block.is_none())),
        );
        let candidate = result_from(picked);
        if best.as_ref().is_none_or(|b| candidate.cost < b.cost) {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| Error::Internal("no mixing basis could be assembled".into()))
}

/// `ρ⁺` (block-respecting optimum) against `ρ⁻` (optimum over bases with a
/// mixing vector).
pub fn sparsity_gap(m: &Matrix, blocks: &BlockSpec, tol: &Tolerance) -> Result<SparsityGap> {
    sparsity_gap_with(m, blocks, tol, SearchOptions::default())
}

pub fn sparsity_gap_with(
    m: &Matrix,
    blocks: &BlockSpec,
    tol: &Tolerance,
    opts: SearchOptions,
) -> Result<SparsityGap> {
    blocks.check_columns(m.cols())?;
    if blocks.len() < 2 {
        return Err(Error::InvalidInput(
            "a sparsity gap needs at least two blocks".into(),
        ));
    }
    let space = Space::new(m, tol, opts)?;
    let respecting = block_respecting(&space, blocks, tol)?;
    let flats = space.flats(Some(blocks));
    let mixing = force_mixing(&space, blocks, &flats)?;
    Ok(SparsityGap {
        rho_plus: respecting.cost,
        rho_minus: mixing.cost,
        independent: respecting.cost < mixing.cost,
        respecting,
        mixing,
    })
}

/// Table whose `(i, j)` entry is the sparsity-gap verdict on blocks `i` and
/// `j` alone. The diagonal is `true`.
pub fn pairwise_sparsity_gap(
    m: &Matrix,
    blocks: &BlockSpec,
    tol: &Tolerance,
) -> Result<Vec<Vec<bool>>> {
    pairwise_sparsity_gap_with(m, blocks, tol, SearchOptions::default())
}

pub fn pairwise_sparsity_gap_with(
    m: &Matrix,
    blocks: &BlockSpec,
    tol: &Tolerance,
    opts: SearchOptions,
) -> Result<Vec<Vec<bool>>> {
    blocks.check_columns(m.cols())?;
    let k = blocks.len();
    let mut table = vec![vec![true; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let sub = m.select_columns(&blocks.columns_of(&[i, j]))?;
            let gap = sparsity_gap_with(&sub, &blocks.restrict(&[i, j]), tol, opts)?;
            table[i][j] = gap.independent;
            table[j][i] = gap.independent;
        }
    }
    Ok(table)
}

/// Optimal cost and the sparsest bases of `col(M)` assembled from
/// minimal-support vectors, at most `limit` of them.
pub fn optimal_bases(
    m: &Matrix,
    tol: &Tolerance,
    opts: SearchOptions,
    limit: usize,
) -> Result<(usize, Vec<Vec<SubspaceVector>>)> {
    let space = Space::new(m, tol, opts)?;
    let flats = space.flats(None);
    let elems: Vec<SubspaceVector> = space.elementary(&flats).into_iter().map(|c| c.vector).collect();
    let n = m.cols();
    let optimum = {
        let mut t = SpanTracker::new(INDEPENDENCE_REL);
        elems
            .iter()
            .filter(|v| t.dim() < n && t.insert(&v.coeff))
            .map(|v| v.support_size)
            .sum::<usize>()
    };
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    collect_bases(
        &elems,
        0,
        &SpanTracker::new(INDEPENDENCE_REL),
        &mut chosen,
        0,
        optimum,
        n,
        limit,
        &mut out,
    );
    Ok((optimum, out))
}

#[allow(clippy::too_many_arguments)]
fn collect_bases(
    elems: &[SubspaceVector],
    start: usize,
    tracker: &SpanTracker,
    chosen: &mut Vec<usize>,
    cost: usize,
    optimum: usize,
    n: usize,
    limit: usize,
    out: &mut Vec<Vec<SubspaceVector>>,
) {
    if out.len() >= limit {
        return;
    }
    if chosen.len() == n {
        if cost == optimum {
            out.push(chosen.iter().map(|&i| elems[i].clone()).collect());
        }
        return;
    }
    let slots = n - chosen.len();
    for i in start..elems.len() {
        // candidates are sorted, so the cheapest completion uses the next sizes
        if cost + slots * elems[i].support_size > optimum {
            break;
        }
        if !tracker.extends(&elems[i].coeff) {
            continue;
        }
        let mut next = tracker.clone();
        next.insert(&elems[i].coeff);
        chosen.push(i);
        collect_bases(elems, i + 1, &next, chosen, cost + elems[i].support_size, optimum, n, limit, out);
        chosen.pop();
    }
}
