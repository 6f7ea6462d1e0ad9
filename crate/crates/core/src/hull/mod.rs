//! Algebraic hulls `G̃ = Ñ ⋊ K` of polynomial-growth models, the
//! almost-nilpotent extension `G_an = G K₁`, growth degrees, invariant
//! reports and consistency checks.

pub mod closure;
pub mod construct;
pub mod golden;
pub mod report;

use crate::exactlin::LinAlgError;
use crate::nilpotent::LieError;
use crate::splitting::SplittingError;

pub use closure::{compact_closure, ClosureDescription};
pub use construct::{
    algebraic_hull, corrupt_embedding, pad_compact_part, verify_hull, Embedding, HullData, HullElement,
    HullVerification,
};
pub use golden::{golden_models, tensor_lattice_model, GoldenModel};
pub use report::{
    check_equivalences, g_an, growth_degree, growth_degree_via_matrices, hull_invariants, EquivalenceReport,
    GanDescription, InvariantReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HullError {
    #[error("spectrum is not on the unit circle: {0}")]
    NotModulusOne(String),
    #[error("group does not have polynomial growth: {0}")]
    NotPolynomialGrowth(String),
    #[error("equivalence violated: {0}")]
    EquivalenceViolation(String),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}
