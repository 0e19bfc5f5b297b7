//! Blocks inferred from the data: components of the `D` graph, each checked
//! for Type D irreducibility.

use serde::Serialize;

use super::check_type_d_irreducible;
use crate::certificate::Certificate;
use crate::error::Result;
use crate::graph::{build_graph, components, FactorGraph, GraphKind};
use crate::numeric::{Matrix, Tolerance};
use crate::sparse::BlockSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    /// One-based columns of each component, ordered by smallest column.
    pub components: Vec<Vec<usize>>,
    /// Component sizes, in component order.
    pub blocks: BlockSpec,
    /// Concatenated components: the column permutation under which
    /// `blocks` applies.
    pub column_order: Vec<usize>,
    /// Whether `column_order` is the identity.
    pub contiguous: bool,
    /// Type D irreducibility of each component.
    pub irreducible: Vec<Certificate>,
    pub graph: FactorGraph,
}

impl Decomposition {
    /// `J` with its columns in `column_order`.
    pub fn permuted(&self, j: &Matrix) -> Result<Matrix> {
        j.select_columns(&self.column_order.iter().map(|c| c - 1).collect::<Vec<_>>())
    }
}

/// Splits the columns of `J` into the components of its `D` graph. Every
/// component is Type D independent of the others by construction; each is
/// then certified irreducible or not.
pub fn decompose(j: &Matrix, tol: &Tolerance) -> Result<Decomposition> {
    let graph = build_graph(j, GraphKind::D, tol)?;
    let comps = components(&graph);
    let blocks = BlockSpec::new(comps.iter().map(Vec::len).collect())?;
    let column_order: Vec<usize> = comps.iter().flatten().copied().collect();
    let contiguous = column_order.iter().enumerate().all(|(i, &c)| c == i + 1);
    let mut decomposition = Decomposition {
        components: comps,
        blocks,
        column_order,
        contiguous,
        irreducible: Vec::new(),
        graph,
    };
    let permuted = decomposition.permuted(j)?;
    decomposition.irreducible = (1..=decomposition.blocks.len())
        .map(|b| check_type_d_irreducible(&permuted, &decomposition.blocks, b, tol))
        .collect::<Result<_>>()?;
    Ok(decomposition)
}
