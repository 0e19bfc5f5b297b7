//! Factor graphs over latent coordinates, their connected components and
//! the row-partition characterizations of block structure.
//!
//! * `D`: columns `i`, `j` are adjacent when their supports intersect.
//! * `M`: adjacent when one support contains the other.
//! * `H2`: adjacent when the cross second derivative `∂²g/∂s_i∂s_j` is
//!   nonzero.
//!
//! Components of these graphs are the candidate factors.

mod audit;
mod partition;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use self::audit::{block_structure, block_count_audit, block_count_audit_with, AuditOptions, BlockStructure};
pub use self::partition::{finest_row_partition, rank_additive_partitions, RowPartition};

use crate::error::{Error, Result};
use crate::numeric::{pitchfork, Matrix, Tolerance};
use crate::tensor::DerivTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    D,
    M,
    H2,
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphKind::D => "D",
            GraphKind::M => "M",
            GraphKind::H2 => "H2",
        })
    }
}

/// Undirected simple graph on vertices `1..=vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorGraph {
    pub kind: GraphKind,
    pub vertex_count: usize,
    /// Edges `(i, j)` with `i < j`, one-based.
    pub edges: BTreeSet<(usize, usize)>,
}

impl FactorGraph {
    pub fn new(kind: GraphKind, vertex_count: usize) -> Self {
        FactorGraph {
            kind,
            vertex_count,
            edges: BTreeSet::new(),
        }
    }

    /// Adds the edge `{i, j}`; self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i >= 1 && j >= 1 && i.max(j) <= self.vertex_count, "vertex out of range");
        if i != j {
            self.edges.insert((i.min(j), i.max(j)));
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Graphviz rendering with one cluster per component.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 8] = [
            "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
        ];
        let mut out = String::new();
        let _ = writeln!(out, "graph G_{} {{", self.kind);
        let _ = writeln!(out, "  node [shape=circle, style=filled];");
        for (c, comp) in components(self).iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{} {{", c + 1);
            let _ = writeln!(out, "    label=\"component {}\";", c + 1);
            for v in comp {
                let _ = writeln!(
                    out,
                    "    {v} [label=\"{v}\", fillcolor=\"{}\"];",
                    PALETTE[c % PALETTE.len()]
                );
            }
            let _ = writeln!(out, "  }}");
        }
        for (i, j) in &self.edges {
            let _ = writeln!(out, "  {i} -- {j};");
        }
        out.push_str("}\n");
        out
    }
}

/// `D` or `M` graph of a Jacobian in the standard basis.
pub fn build_graph(j: &Matrix, kind: GraphKind, tol: &Tolerance) -> Result<FactorGraph> {
    let supports = j.column_supports(tol);
    let mut g = FactorGraph::new(kind, j.cols());
    for a in 0..j.cols() {
        for b in a + 1..j.cols() {
            let adjacent = match kind {
                GraphKind::D => supports[a].intersects(&supports[b]),
                GraphKind::M => !pitchfork(&supports[a], &supports[b])?,
                GraphKind::H2 => {
                    return Err(Error::InvalidInput(
                        "the H2 graph is built from a Hessian tensor".into(),
                    ))
                }
            };
            if adjacent {
                g.add_edge(a + 1, b + 1);
            }
        }
    }
    Ok(g)
}

/// `H2` graph of a Hessian `d_x × d_s × d_s`.
pub fn build_hessian_graph(h: &DerivTensor, tol: &Tolerance) -> Result<FactorGraph> {
    if h.order() != 2 {
        return Err(Error::Shape(format!(
            "expected a Hessian, got a derivative tensor of order {}",
            h.order()
        )));
    }
    h.check_symmetric(tol)?;
    let thresh = h.threshold(tol);
    let d = h.in_dim();
    let mut g = FactorGraph::new(GraphKind::H2, d);
    for a in 0..d {
        for b in a + 1..d {
            if h.fiber(&[a, b]).iter().any(|x| x.abs() > thresh) {
                g.add_edge(a + 1, b + 1);
            }
        }
    }
    Ok(g)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }

    /// Classes as sorted zero-based lists, ordered by smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let r = self.find(v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(v);
        }
        out
    }
}

/// Connected components as sorted one-based vertex lists, ordered by their
/// smallest vertex.
pub fn components(g: &FactorGraph) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(g.vertex_count);
    for &(i, j) in &g.edges {
        uf.union(i - 1, j - 1);
    }
    uf.classes()
        .into_iter()
        .map(|c| c.into_iter().map(|v| v + 1).collect())
        .collect()
}
