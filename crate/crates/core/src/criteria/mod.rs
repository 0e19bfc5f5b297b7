//! Independence and irreducibility checkers. Every checker returns a
//! [`Certificate`]; block indices in arguments and witnesses are one-based.
//!
//! * `D`: cross-block columns have disjoint supports.
//! * `M`: no cross-block column support contains another.
//! * `S`: the sparsest basis respecting the blocks is strictly sparser than
//!   any basis with a mixing vector.
//! * `H2`, `H3`: cross-block slices of the second or third derivative vanish.
//! * `O`: cross-block columns are orthogonal.

mod decompose;
mod hierarchy;
mod transfer;
mod type_d;
mod type_h;
mod type_m;
mod type_s;

pub use self::decompose::{decompose, Decomposition};
pub use self::hierarchy::hierarchy_audit;
pub use self::transfer::{check_l0_nonincrease, check_support_union, extract_assignment};
pub use self::type_d::{check_type_d, check_type_d_irreducible, check_type_o, compositional_contrast};
pub use self::type_h::{check_separability, check_type_h, check_type_h_irreducible};
pub use self::type_m::{check_type_m, check_type_m_irreducible, type_m_by_row_intersections};
pub use self::type_s::{check_type_s, check_type_s_irreducible, check_type_s_pairwise};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::sparse::BlockSpec;

/// Zero-based block index for a one-based argument.
fn block_index(blocks: &BlockSpec, block: usize) -> Result<usize> {
    if block == 0 || block > blocks.len() {
        return Err(Error::InvalidInput(format!(
            "block {block} out of range 1..={}",
            blocks.len()
        )));
    }
    Ok(block - 1)
}

/// Columns of one block.
fn block_columns(j: &Matrix, blocks: &BlockSpec, b: usize) -> Result<Matrix> {
    j.select_columns(&blocks.range(b).collect::<Vec<_>>())
}

/// Cross-block column pairs `(a, b)`, zero-based with `a < b`, in
/// lexicographic order.
fn cross_pairs(blocks: &BlockSpec) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = blocks.total();
    (0..n).flat_map(move |a| {
        (a + 1..n)
            .filter(move |&b| blocks.block_of(a) != blocks.block_of(b))
            .map(move |b| (a, b))
    })
}

#[cfg(test)]
mod tests;
