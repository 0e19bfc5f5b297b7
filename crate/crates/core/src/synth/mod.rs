//! Ground-truth instances: overlapping-slot Jacobians, random block mixings,
//! smooth generators and finite-difference derivatives.

mod fd;
mod mixing;
mod overlap;
mod smooth;

pub use self::fd::{fd_hessian, fd_jacobian, EvalFunction, HESSIAN_STEP, JACOBIAN_STEP};
pub use self::mixing::{random_mixing, Mixing, MixingKind};
pub use self::overlap::{gen_overlap_jacobian, ExpectedVerdicts, OverlapInstance, OverlapTemplate};
pub use self::smooth::SlotGenerator;

#[cfg(test)]
mod tests;
