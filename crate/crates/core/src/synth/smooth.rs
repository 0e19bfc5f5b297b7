//! Smooth generators with planted slot structure: every output is a sum of
//! sinusoids of single latent coordinates, optionally plus one bilinear
//! term coupling two slots.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fd::EvalFunction;
use super::overlap::{row_layout, OverlapTemplate};
use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::sparse::BlockSpec;
use crate::tensor::DerivTensor;

#[derive(Clone, Debug, PartialEq)]
struct Wave {
    col: usize,
    amp: f64,
    freq: f64,
    phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct Output {
    waves: Vec<Wave>,
    /// `γ · s_a · s_b` on zero-based coordinates `a`, `b`.
    coupling: Option<(usize, usize, f64)>,
}

/// `f_r(s) = Σ a sin(w s_c + b) [+ γ s_a s_b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotGenerator {
    blocks: BlockSpec,
    outputs: Vec<Output>,
}

fn signed<R: Rng>(rng: &mut R) -> f64 {
    let mag: f64 = rng.random_range(0.5..=2.0);
    if rng.random_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn output<R: Rng>(rng: &mut R, blocks: &BlockSpec, slots: &[usize], couple: bool) -> Output {
    let waves = slots
        .iter()
        .flat_map(|&s| blocks.range(s))
        .map(|col| Wave {
            col,
            amp: signed(rng),
            freq: rng.random_range(0.5..=1.5),
            phase: rng.random_range(0.0..TAU),
        })
        .collect();
    let coupling = match slots {
        [a, b] if couple => {
            let ca = rng.random_range(blocks.range(*a));
            let cb = rng.random_range(blocks.range(*b));
            Some((ca, cb, rng.random_range(0.5..=2.0)))
        }
        _ => None,
    };
    Output { waves, coupling }
}

impl SlotGenerator {
    /// Two outputs per latent coordinate of each slot, plus one output per
    /// adjacent slot pair loading additively on both. Mixed second
    /// derivatives vanish everywhere.
    pub fn additive(blocks: &BlockSpec, seed: u64) -> Result<Self> {
        Self::paired(blocks, seed, false)
    }

    /// As [`SlotGenerator::additive`], but each pair output also carries
    /// `γ · s_a · s_b` with `γ ∈ [0.5, 2]`, `s_a` and `s_b` in the two slots.
    pub fn with_interaction(blocks: &BlockSpec, seed: u64) -> Result<Self> {
        Self::paired(blocks, seed, true)
    }

    fn paired(blocks: &BlockSpec, seed: u64, couple: bool) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidInput("need at least two slots".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outputs = Vec::new();
        for i in 0..blocks.len() {
            for _ in 0..2 * blocks.dims()[i] {
                outputs.push(output(&mut rng, blocks, &[i], couple));
            }
            if i + 1 < blocks.len() {
                outputs.push(output(&mut rng, blocks, &[i, i + 1], couple));
            }
        }
        Ok(SlotGenerator {
            blocks: blocks.clone(),
            outputs,
        })
    }

    /// One output per template row, loading on the same slots; shared rows
    /// are coupled so that second-order structure follows the first-order one.
    pub fn from_template(t: &OverlapTemplate) -> Result<Self> {
        let blocks = BlockSpec::uniform(t.k, t.slot_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
        let mut outputs = Vec::new();
        for (_, slots, count) in row_layout(t) {
            for _ in 0..count {
                outputs.push(output(&mut rng, &blocks, &slots, true));
            }
        }
        Ok(SlotGenerator { blocks, outputs })
    }

    pub fn blocks(&self) -> &BlockSpec {
        &self.blocks
    }

    pub fn out_dim(&self) -> usize {
        self.outputs.len()
    }

    pub fn in_dim(&self) -> usize {
        self.blocks.total()
    }

    /// Closed-form Jacobian at `s`.
    pub fn jacobian(&self, s: &[f64]) -> Matrix {
        let mut j = Matrix::zeros(self.out_dim(), self.in_dim());
        for (r, o) in self.outputs.iter().enumerate() {
            for w in &o.waves {
                j.set(r, w.col, j.get(r, w.col) + w.amp * w.freq * (w.freq * s[w.col] + w.phase).cos());
            }
            if let Some((a, b, g)) = o.coupling {
                j.set(r, a, j.get(r, a) + g * s[b]);
                j.set(r, b, j.get(r, b) + g * s[a]);
            }
        }
        j
    }

    /// Closed-form Hessian at `s`.
    pub fn hessian(&self, s: &[f64]) -> DerivTensor {
        let mut h = DerivTensor::zeros(self.out_dim(), self.in_dim(), 2).expect("positive shape");
        for (r, o) in self.outputs.iter().enumerate() {
            for w in &o.waves {
                let c = w.col;
                let v = h.get(r, &[c, c]) - w.amp * w.freq * w.freq * (w.freq * s[c] + w.phase).sin();
                h.set(r, &[c, c], v);
            }
            if let Some((a, b, g)) = o.coupling {
                h.set(r, &[a, b], h.get(r, &[a, b]) + g);
                h.set(r, &[b, a], h.get(r, &[b, a]) + g);
            }
        }
        h
    }
}

impl EvalFunction for SlotGenerator {
    fn eval(&self, s: &[f64]) -> Vec<f64> {
        self.outputs
            .iter()
            .map(|o| {
                let waves: f64 = o.waves.iter().map(|w| w.amp * (w.freq * s[w.col] + w.phase).sin()).sum();
                waves + o.coupling.map_or(0.0, |(a, b, g)| g * s[a] * s[b])
            })
            .collect()
    }
}
