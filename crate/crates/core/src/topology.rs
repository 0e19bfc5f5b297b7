//! Connectivity of discretized latent regions and of their `k`-slices.
//!
//! A region is a set of occupied cells in a `K`-dimensional grid, one axis
//! per factor; cells are adjacent when they differ by one in exactly one
//! coordinate. A `k`-slice holds all but `k` axes fixed. Verdicts describe
//! the discretization, not the continuum it approximates.
//!
//! Axes are numbered from 1; cell coordinates start at 0.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certificate::{Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::hex_string;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRegion", into = "RawRegion")]
pub struct GridRegion {
    dims: Vec<usize>,
    occupancy: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawRegion {
    dims: Vec<usize>,
    occupied: Vec<Vec<usize>>,
}

impl TryFrom<RawRegion> for GridRegion {
    type Error = Error;
    fn try_from(raw: RawRegion) -> Result<Self> {
        GridRegion::from_cells(raw.dims, &raw.occupied)
    }
}

impl From<GridRegion> for RawRegion {
    fn from(r: GridRegion) -> Self {
        RawRegion {
            occupied: r.occupied_cells(),
            dims: r.dims,
        }
    }
}

impl GridRegion {
    pub fn from_cells(dims: Vec<usize>, cells: &[Vec<usize>]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput(format!("grid dims must be positive, got {dims:?}")));
        }
        let total: usize = dims.iter().product();
        let mut occupancy = vec![false; total];
        for c in cells {
            if c.len() != dims.len() || c.iter().zip(&dims).any(|(x, d)| x >= d) {
                return Err(Error::InvalidInput(format!("cell {c:?} outside grid {dims:?}")));
            }
            occupancy[flat(&dims, c)] = true;
        }
        if !occupancy.contains(&true) {
            return Err(Error::InvalidInput("region has no occupied cell".into()));
        }
        Ok(GridRegion { dims, occupancy })
    }

    /// Region of the cells where `pred` holds.
    pub fn from_fn(dims: Vec<usize>, pred: impl Fn(&[usize]) -> bool) -> Result<Self> {
        let cells: Vec<Vec<usize>> = all_cells(&dims).into_iter().filter(|c| pred(c)).collect();
        GridRegion::from_cells(dims, &cells)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn contains(&self, cell: &[usize]) -> bool {
        self.occupancy[flat(&self.dims, cell)]
    }

    /// Occupied cells in row-major order.
    pub fn occupied_cells(&self) -> Vec<Vec<usize>> {
        all_cells(&self.dims).into_iter().filter(|c| self.contains(c)).collect()
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for d in &self.dims {
            h.update((*d as u64).to_le_bytes());
        }
        for &o in &self.occupancy {
            h.update([u8::from(o)]);
        }
        hex_string(&h.finalize())
    }
}

fn flat(dims: &[usize], cell: &[usize]) -> usize {
    cell.iter().zip(dims).fold(0, |acc, (c, d)| acc * d + c)
}

fn all_cells(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut f| {
            let mut c = vec![0; dims.len()];
            for (slot, d) in c.iter_mut().zip(dims).rev() {
                *slot = f % d;
                f /= d;
            }
            c
        })
        .collect()
}

/// Whether the occupied cells matching `fixed` (axis, coordinate pairs,
/// zero-based axes) form one orthogonally connected set. Empty sets count as
/// connected.
fn connected_within(r: &GridRegion, fixed: &[(usize, usize)]) -> bool {
    let inside = |c: &[usize]| r.contains(c) && fixed.iter().all(|&(a, v)| c[a] == v);
    let cells: Vec<Vec<usize>> = all_cells(&r.dims).into_iter().filter(|c| inside(c)).collect();
    let Some(start) = cells.first() else {
        return true;
    };
    let mut seen = vec![false; r.occupancy.len()];
    let mut queue = VecDeque::from([start.clone()]);
    seen[flat(&r.dims, start)] = true;
    let mut reached = 1;
    while let Some(c) = queue.pop_front() {
        for axis in 0..r.dims.len() {
            for step in [-1i64, 1] {
                let v = c[axis] as i64 + step;
                if v < 0 || v >= r.dims[axis] as i64 {
                    continue;
                }
                let mut n = c.clone();
                n[axis] = v as usize;
                let f = flat(&r.dims, &n);
                if !seen[f] && inside(&n) {
                    seen[f] = true;
                    reached += 1;
                    queue.push_back(n);
                }
            }
        }
    }
    reached == cells.len()
}

/// Flood fill over orthogonally adjacent occupied cells.
pub fn is_connected(r: &GridRegion) -> bool {
    connected_within(r, &[])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SliceVerdict {
    /// Fixed `(axis, coordinate)` pairs, axes one-based.
    pub fixed: Vec<(usize, usize)>,
    pub connected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SliceReport {
    pub k: usize,
    pub slices: Vec<SliceVerdict>,
    pub all_connected: bool,
}

impl SliceReport {
    pub fn disconnected(&self) -> usize {
        self.slices.iter().filter(|s| !s.connected).count()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

/// Verdict for every nonempty `k`-slice, free axes enumerated in ascending
/// bit order and fixed coordinates in row-major order.
pub fn slices_connected(r: &GridRegion, k: usize) -> Result<SliceReport> {
    slices_connected_with(r, k, Exec::default())
}

pub fn slices_connected_with(r: &GridRegion, k: usize, exec: Exec) -> Result<SliceReport> {
    let kk = r.factors();
    if k == 0 || k >= kk {
        return Err(Error::InvalidInput(format!("slice order {k} outside 1..{kk}")));
    }
    let mut specs: Vec<Vec<(usize, usize)>> = Vec::new();
    for free in combinations(kk, k) {
        let fixed_axes: Vec<usize> = (0..kk).filter(|a| !free.contains(a)).collect();
        let fixed_dims: Vec<usize> = fixed_axes.iter().map(|&a| r.dims[a]).collect();
        for coords in all_cells(&fixed_dims) {
            specs.push(fixed_axes.iter().copied().zip(coords).collect());
        }
    }
    let verdicts = exec.map_slice(&specs, |fixed| {
        let nonempty = r
            .occupied_cells()
            .iter()
            .any(|c| fixed.iter().all(|&(a, v)| c[a] == v));
        nonempty.then(|| SliceVerdict {
            fixed: fixed.iter().map(|&(a, v)| (a + 1, v)).collect(),
            connected: connected_within(r, fixed),
        })
    });
    let slices: Vec<SliceVerdict> = verdicts.into_iter().flatten().collect();
    let all_connected = slices.iter().all(|s| s.connected);
    Ok(SliceReport {
        k,
        slices,
        all_connected,
    })
}

/// Both grid-checkable premises of the local-to-global argument: the region
/// is connected and every `(K−1)`-slice is connected.
pub fn premise_report(r: &GridRegion) -> Result<Certificate> {
    if r.factors() < 2 {
        return Err(Error::InvalidInput("slices need at least two factors".into()));
    }
    let connected = is_connected(r);
    let slices = slices_connected(r, r.factors() - 1)?;
    Ok(Certificate::new(
        Criterion::Topology,
        connected && slices.all_connected,
        Witness::Topology {
            connected,
            slices_connected: slices.all_connected,
            disconnected_slices: slices.disconnected(),
        },
        r.digest(),
    )
    .with_note("local injectivity of the generator is outside the grid check and must be established separately")
    .with_note("verdicts concern the grid discretization with orthogonal adjacency"))
}
