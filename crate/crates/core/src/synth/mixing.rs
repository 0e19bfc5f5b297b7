//! Random invertible mixings of the latent coordinates.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::random::{random_invertible, uniform_matrix};
use crate::numeric::{cond1, Matrix};
use crate::sparse::BlockSpec;

/// Largest accepted 1-norm condition number.
const MAX_COND: f64 = 1e6;
const ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MixingKind {
    BlockDiagonal,
    Full,
    BlockPermuted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mixing {
    pub matrix: Matrix,
    /// Planted block map (one-based targets) when the mixing preserves blocks.
    pub sigma: Option<Vec<usize>>,
    /// Column blocks of `J · matrix`.
    pub target_blocks: BlockSpec,
}

/// Invertible `n × n` mixing with condition number at most `1e6`.
///
/// * `BlockDiagonal`: one random block per factor, `σ` the identity.
/// * `BlockPermuted`: block-diagonal mixing followed by a random
///   non-identity permutation `π` of the blocks; source block `i` lands at
///   target position `σ(i) = π(i)`.
/// * `Full`: dense, no block map.
pub fn random_mixing(blocks: &BlockSpec, kind: MixingKind, seed: u64) -> Result<Mixing> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks.total();
    let k = blocks.len();
    for _ in 0..ATTEMPTS {
        let mixing = match kind {
            MixingKind::Full => Mixing {
                matrix: uniform_matrix(&mut rng, n, n),
                sigma: None,
                target_blocks: blocks.clone(),
            },
            MixingKind::BlockDiagonal | MixingKind::BlockPermuted => {
                let mut perm: Vec<usize> = (0..k).collect();
                if kind == MixingKind::BlockPermuted && k > 1 {
                    while perm.iter().enumerate().all(|(i, &p)| i == p) {
                        perm.shuffle(&mut rng);
                    }
                }
                // target position j holds source block inverse[j]
                let mut inverse = vec![0; k];
                for (i, &p) in perm.iter().enumerate() {
                    inverse[p] = i;
                }
                let target_blocks = BlockSpec::new(inverse.iter().map(|&i| blocks.dims()[i]).collect())?;
                let mut matrix = Matrix::zeros(n, n);
                for (i, &p) in perm.iter().enumerate() {
                    let d = blocks.dims()[i];
                    let blk = random_invertible(&mut rng, d, MAX_COND, ATTEMPTS)?;
                    let (rs, cs) = (blocks.range(i).start, target_blocks.range(p).start);
                    for a in 0..d {
                        for b in 0..d {
                            matrix.set(rs + a, cs + b, blk.get(a, b));
                        }
                    }
                }
                Mixing {
                    matrix,
                    sigma: Some(perm.iter().map(|p| p + 1).collect()),
                    target_blocks,
                }
            }
        };
        if matches!(cond1(&mixing.matrix), Ok(c) if c <= MAX_COND) {
            return Ok(mixing);
        }
    }
    Err(Error::Generation(format!(
        "no mixing with condition number <= {MAX_COND} in {ATTEMPTS} draws"
    )))
}
