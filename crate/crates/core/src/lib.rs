//! Decide, certify and explain mechanistic independence criteria on
//! Jacobians and derivative tensors.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`] – dense matrices, supports, ranks, ℓ0 norms.
//! * [`sparse`] – exact sparsest bases of a column space and sparsity gaps.
//! * [`graph`] – factor graphs, components and rank-additive row partitions.
//! * [`criteria`] – the independence / irreducibility checkers, each
//!   returning a [`Certificate`].
//! * [`topology`] – connectivity of discretized latent regions and slices.
//! * [`synth`] – planted instances, random mixings, finite differences.
//! * [`report`] – input loaders and report rendering used by the CLI.

pub mod certificate;
pub mod criteria;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod graph;
pub mod numeric;
pub mod report;

pub mod sparse;
pub mod synth;
pub mod tensor;
pub mod topology;

pub use certificate::{Certificate, Criterion, Witness};
pub use error::{Error, Result};
pub use exec::Exec;
pub use numeric::{Matrix, SupportMask, Tolerance};
pub use sparse::BlockSpec;
pub use tensor::DerivTensor;
