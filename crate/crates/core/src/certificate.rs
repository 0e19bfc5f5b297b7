//! Structured verdicts emitted by every checker.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::numeric::hex_string;
use crate::sparse::BasisSearchResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "D")]
    TypeD,
    #[serde(rename = "D-irreducible")]
    TypeDIrreducible,
    #[serde(rename = "M")]
    TypeM,
    #[serde(rename = "M-irreducible")]
    TypeMIrreducible,
    #[serde(rename = "S")]
    TypeS,
    #[serde(rename = "S-pairwise")]
    TypeSPairwise,
    #[serde(rename = "S-irreducible")]
    TypeSIrreducible,
    #[serde(rename = "H2")]
    TypeH2,
    #[serde(rename = "H3")]
    TypeH3,
    #[serde(rename = "H2-irreducible")]
    TypeH2Irreducible,
    #[serde(rename = "H3-irreducible")]
    TypeH3Irreducible,
    #[serde(rename = "O")]
    TypeO,
    #[serde(rename = "separability")]
    Separability,
    #[serde(rename = "supportUnion")]
    SupportUnion,
    #[serde(rename = "l0NonIncrease")]
    L0NonIncrease,
    #[serde(rename = "hierarchy")]
    Hierarchy,
    #[serde(rename = "assignment")]
    Assignment,
    #[serde(rename = "blockStructure")]
    BlockStructure,
    #[serde(rename = "topology")]
    Topology,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::TypeD => "D",
            Criterion::TypeDIrreducible => "D-irreducible",
            Criterion::TypeM => "M",
            Criterion::TypeMIrreducible => "M-irreducible",
            Criterion::TypeS => "S",
            Criterion::TypeSPairwise => "S-pairwise",
            Criterion::TypeSIrreducible => "S-irreducible",
            Criterion::TypeH2 => "H2",
            Criterion::TypeH3 => "H3",
            Criterion::TypeH2Irreducible => "H2-irreducible",
            Criterion::TypeH3Irreducible => "H3-irreducible",
            Criterion::TypeO => "O",
            Criterion::Separability => "separability",
            Criterion::SupportUnion => "supportUnion",
            Criterion::L0NonIncrease => "l0NonIncrease",
            Criterion::Hierarchy => "hierarchy",
            Criterion::Assignment => "assignment",
            Criterion::BlockStructure => "blockStructure",
            Criterion::Topology => "topology",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evidence attached to a verdict. Index fields are one-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Witness {
    None,
    /// Two columns from different blocks and the rows where both are nonzero.
    ColumnPair {
        columns: [usize; 2],
        rows: Vec<usize>,
    },
    /// Support of `smaller` is contained in the support of `larger`.
    Containment {
        smaller: usize,
        larger: usize,
        smaller_support: Vec<usize>,
        larger_support: Vec<usize>,
    },
    /// Cross-block inner product that is not zero.
    InnerProduct {
        columns: [usize; 2],
        value: f64,
    },
    RowSplit {
        groups: Vec<Vec<usize>>,
    },
    ColumnSplit {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    SparsityGap {
        rho_plus: usize,
        rho_minus: usize,
        basis: BasisSearchResult,
    },
    PairwiseGap {
        table: Vec<Vec<bool>>,
    },
    /// A split of a block's column space, given by coefficient vectors
    /// relative to the block's own columns.
    SubspaceSplit {
        first: Vec<Vec<f64>>,
        second: Vec<Vec<f64>>,
        rho_plus: usize,
        rho_minus: usize,
    },
    TensorEntry {
        row: usize,
        indices: Vec<usize>,
        value: f64,
    },
    ZeroSlice {
        block: usize,
    },
    Separability {
        block: usize,
        image_rank: usize,
        competitor_rank: usize,
        joint_rank: usize,
    },
    SupportMismatch {
        column: usize,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    L0Counts {
        source: usize,
        target: usize,
    },
    Assignment {
        sigma: Vec<usize>,
    },
    BlockRow {
        block_row: usize,
        targets: Vec<usize>,
    },
    Hierarchy {
        outcomes: BTreeMap<String, bool>,
        violations: Vec<String>,
    },
    BlockStructure {
        count: usize,
        row_groups: Vec<Vec<usize>>,
        row_order: Vec<usize>,
        basis: Vec<Vec<f64>>,
        sampled_max: usize,
    },
    Topology {
        connected: bool,
        slices_connected: bool,
        disconnected_slices: usize,
    },
}

impl Witness {
    pub fn is_none(&self) -> bool {
        matches!(self, Witness::None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificate {
    pub criterion: Criterion,
    pub holds: bool,
    pub witness: Witness,
    pub notes: Vec<String>,
    pub inputs_digest: String,
}

impl Certificate {
    pub fn new(criterion: Criterion, holds: bool, witness: Witness, inputs_digest: String) -> Self {
        debug_assert!(holds || !witness.is_none(), "failing {criterion} needs a witness");
        Certificate {
            criterion,
            holds,
            witness,
            notes: Vec::new(),
            inputs_digest,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Hash of several input digests, for certificates over more than one input.
pub fn combine_digests<S: AsRef<str>>(parts: &[S]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_ref().as_bytes());
        h.update([0u8]);
    }
    hex_string(&h.finalize())
}
