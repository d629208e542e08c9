//! Curvature-operator block algebra in dimension four.
//!
//! The curvature operator of a 4-manifold point splits over the self-dual /
//! anti-self-dual decomposition of the bivector space into blocks
//! [[A, B], [Bᵀ, C]]. This crate provides:
//!
//! - conversion between dense Riemann components and block form, with the
//!   traceless Ricci tensor recovered from the mixed block ([`curvature`]);
//! - the sharp operator, the trilinear invariant and the classification
//!   quantity P by two independently computed routes ([`invariants`]);
//! - pointwise pinching functionals: the isotropic-positivity predicate, the
//!   pinching ratio and the nonnegative drop term ([`pinching`]);
//! - the pointwise reaction ODE dR/dt = R² + R^# with adaptive integration
//!   and inequality monitors along trajectories ([`flow`]);
//! - brute-force verification of the extremal constants and the conformal
//!   mixed-block cone inequality ([`extremal`]);
//! - the model-space table as ground-truth fixtures ([`catalog`]);
//! - versioned JSON schemas and CSV trajectory export ([`io`], [`flow`]).
//!
//! All randomized machinery is seeded and deterministic: batch entries are
//! derived from per-index substreams, so results do not depend on thread
//! count.

// index-heavy small-matrix code reads better with explicit loops, and the
// `!(x > 0)` comparisons are deliberate NaN-rejecting guards
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod checks;
pub mod curvature;
pub mod error;
pub mod extremal;
pub mod flow;
pub mod invariants;
pub mod io;
pub mod mat3;
pub mod pinching;
pub mod sampling;

pub use curvature::{
    blocks_from_riemann, diagonalize, ricci_data, riemann_from_blocks, weyl_parts,
    CurvatureBlocks, RiemannTensor, SpectralData,
};
pub use error::{CurvError, Result};
pub use extremal::{ConeKind, SweepConfig, SweepResult};
pub use flow::{FlowConfig, FlowTrajectory};
pub use invariants::{p_direct, p_expansion, p_via_expansion, tri, ExpansionInput};
pub use mat3::{adjugate3, eigen_sym3, singular_values3, Mat3, Sym3};
pub use pinching::{e_functional, gradient_identity_residual, PinchingReport};
