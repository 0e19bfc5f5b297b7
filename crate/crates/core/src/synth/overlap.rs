//! Jacobians of `K` slots whose outputs are concatenated as
//! `g^(1), g^(1,2), g^(2), g^(2,3), …, g^(K)`: each `g^(i)` block of rows
//! loads on slot `i` only and each `g^(i,i+1)` block loads on two adjacent
//! slots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::sparse::BlockSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlapTemplate {
    pub k: usize,
    pub slot_dim: usize,
    pub slot_out: usize,
    pub overlap_ratio: f64,
    pub seed: u64,
}

impl OverlapTemplate {
    pub fn new(k: usize, overlap_ratio: f64, seed: u64) -> Self {
        OverlapTemplate {
            k,
            slot_dim: 3,
            slot_out: 20,
            overlap_ratio,
            seed,
        }
    }

    /// Rows shared by each adjacent slot pair:
    /// `round(r / (1 − r) · slot_out)`, so that at `r = 0.5` a pair group is
    /// as large as a slot group.
    pub fn pair_rows(&self) -> usize {
        let r = self.overlap_ratio;
        (r / (1.0 - r) * self.slot_out as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidInput(format!("need at least two slots, got {}", self.k)));
        }
        if self.slot_dim == 0 || self.slot_out == 0 {
            return Err(Error::InvalidInput("slot dimension and slot outputs must be positive".into()));
        }
        if self.slot_out < self.slot_dim {
            return Err(Error::InvalidInput(format!(
                "{} outputs per slot cannot have rank {}",
                self.slot_out, self.slot_dim
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_ratio) {
            return Err(Error::InvalidInput(format!(
                "overlap ratio {} outside [0, 1)",
                self.overlap_ratio
            )));
        }
        if self.pair_rows() > self.slot_out {
            return Err(Error::InvalidInput(format!(
                "overlap {} gives {} shared rows per pair, more than the {} slot outputs",
                self.overlap_ratio,
                self.pair_rows(),
                self.slot_out
            )));
        }
        Ok(())
    }
}

/// Ground truth recorded next to a generated Jacobian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectedVerdicts {
    pub type_d: bool,
    pub type_m: bool,
    /// Components of the `D` graph.
    pub components: usize,
    /// One-based slot pairs whose columns share rows.
    pub block_adjacency: Vec<(usize, usize)>,
    pub pair_rows: usize,
    /// `[first, last]` one-based output rows of each concatenated group, in
    /// order `g^(1), g^(1,2), g^(2), …`.
    pub row_groups: Vec<(String, [usize; 2])>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlapInstance {
    pub template: OverlapTemplate,
    pub jacobian: Matrix,
    pub blocks: BlockSpec,
    pub expected: ExpectedVerdicts,
}

impl OverlapInstance {
    /// JSON sidecar: template, blocks and ground truth, without the matrix.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "template": self.template,
            "blocks": self.blocks,
            "expected": self.expected,
        })
    }
}

/// Groups of rows with the slots they load on (zero-based).
pub(crate) fn row_layout(t: &OverlapTemplate) -> Vec<(String, Vec<usize>, usize)> {
    let p = t.pair_rows();
    let mut out = Vec::new();
    for i in 0..t.k {
        out.push((format!("g({})", i + 1), vec![i], t.slot_out));
        if i + 1 < t.k && p > 0 {
            out.push((format!("g({},{})", i + 1, i + 2), vec![i, i + 1], p));
        }
    }
    out
}

/// Draws entries uniformly in `[0.5, 2]` with random sign on the template's
/// support pattern: every row is dense on the columns of the slots it loads
/// on and zero elsewhere.
pub fn gen_overlap_jacobian(t: &OverlapTemplate) -> Result<OverlapInstance> {
    t.validate()?;
    let layout = row_layout(t);
    let rows: usize = layout.iter().map(|g| g.2).sum();
    let cols = t.k * t.slot_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let mut j = Matrix::zeros(rows, cols);
    let mut row_groups = Vec::new();
    let mut r0 = 0;
    for (name, slots, count) in &layout {
        for r in r0..r0 + count {
            for &s in slots {
                for c in s * t.slot_dim..(s + 1) * t.slot_dim {
                    let mag: f64 = rng.random_range(0.5..=2.0);
                    j.set(r, c, if rng.random_bool(0.5) { mag } else { -mag });
                }
            }
        }
        row_groups.push((name.clone(), [r0 + 1, r0 + count]));
        r0 += count;
    }
    let p = t.pair_rows();
    let expected = ExpectedVerdicts {
        type_d: p == 0,
        type_m: true,
        components: if p == 0 { t.k } else { 1 },
        block_adjacency: if p == 0 {
            Vec::new()
        } else {
            (1..t.k).map(|i| (i, i + 1)).collect()
        },
        pair_rows: p,
        row_groups,
    };
    Ok(OverlapInstance {
        template: t.clone(),
        jacobian: j,
        blocks: BlockSpec::uniform(t.k, t.slot_dim)?,
        expected,
    })
}
