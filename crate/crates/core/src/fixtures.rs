//! The four worked Jacobians (A–D) and the two printed basis changes used as
//! golden vectors throughout the test suites and the CLI demos.

use crate::numeric::Matrix;
use crate::sparse::BlockSpec;

fn build(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).expect("fixture matrices are well formed")
}

/// 8×2, blocks (1,1).
pub fn matrix_a() -> Matrix {
    build(&[
        &[1.0, 0.0],
        &[1.0, 0.0],
        &[-2.0, 1.0],
        &[-1.0, 1.0],
        &[1.0, 1.0],
        &[2.0, 1.0],
        &[0.0, 1.0],
        &[0.0, 1.0],
    ])
}

/// 6×3, blocks (1,1,1). Pairwise but not mutually sparsity-gapped.
pub fn matrix_b() -> Matrix {
    build(&[
        &[1.0, 0.0, -1.0],
        &[1.0, 0.0, 0.0],
        &[-1.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0],
        &[0.0, -1.0, 1.0],
        &[0.0, 0.0, 1.0],
    ])
}

/// 6×3, blocks (1,1,1).
pub fn matrix_c() -> Matrix {
    build(&[
        &[1.0, 0.0, 1.0],
        &[1.0, 0.0, 0.0],
        &[-1.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0],
        &[0.0, -1.0, 1.0],
        &[0.0, 0.0, 1.0],
    ])
}

/// 8×4, blocks (2,2).
pub fn matrix_d() -> Matrix {
    build(&[
        &[-1.0, 1.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[1.0, 2.0, 0.0, 0.0],
        &[0.0, 1.0, 1.0, 0.0],
        &[3.0, -1.0, 1.0, 0.0],
        &[0.0, 0.0, 2.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, -1.0, 3.0],
    ])
}

/// Full 3×3 mixing of B that keeps ‖B·G‖₀ = ‖B‖₀.
pub fn matrix_b_mixing() -> Matrix {
    build(&[&[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]])
}

/// 2×2 mixing of D's first block that keeps its ℓ0 norm.
pub fn matrix_d_block1_mixing() -> Matrix {
    build(&[&[1.0, 0.0], &[1.0, 1.0]])
}

pub fn blocks_a() -> BlockSpec {
    BlockSpec::new(vec![1, 1]).unwrap()
}

pub fn blocks_bc() -> BlockSpec {
    BlockSpec::new(vec![1, 1, 1]).unwrap()
}

pub fn blocks_d() -> BlockSpec {
    BlockSpec::new(vec![2, 2]).unwrap()
}
