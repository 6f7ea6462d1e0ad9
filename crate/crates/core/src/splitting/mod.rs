//! Semisimple splittings of groups `B ⋊ ℤ^k`: the nilradical, the
//! commuting family of semisimple parts and its fixed group, the
//! homomorphism to the semisimple parts, the nil-shadow model, and the
//! Lie-algebra counterpart for solvable algebras.

pub mod conjugacy;
pub mod lie;
pub mod model;
pub mod ops;
pub mod relations;

use serde::Serialize;

use crate::exactlin::LinAlgError;
use crate::nilpotent::LieError;

pub use conjugacy::{conjugate_commuting_set, conjugate_to_fixed, semisimple_aut};
pub use lie::{cartan_subalgebra, nilshadow_lie_algebra, NilShadowAlgebra};
pub use model::{Base, GroupModel, ModelAut, ModelElement, ModelSpec};
pub use ops::{
    beta, breaks_nilpotency, check_semisimple_aut, fixed_group, image_identity_holds, in_c_family, minimal_splitting,
    nilradical, nilshadow_model, semisimple_part, structure_decomposition, Decomposition, MinimalityCertificate,
    NilShadowModel, Nilradical, SplittingData, SubgroupData,
};
pub use relations::{finite_relations, relation_lattice, RelationLattice};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplittingError {
    #[error("actions {i} and {j} do not commute")]
    NonCommuting { i: usize, j: usize },
    #[error("action {0} is not invertible")]
    NotInvertible(usize),
    #[error("action {0} does not preserve the integer lattice")]
    NotLatticePreserving(usize),
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("group does not have polynomial growth: {0}")]
    NotPolynomialGrowth(String),
    #[error("algebra is not solvable: {0}")]
    NotSolvable(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("numeric stage failed: {0}")]
    Numeric(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Whether a result is certified exactly or rests on a numeric heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Exactness {
    Exact,
    Heuristic,
}

impl Exactness {
    pub fn and(self, other: Exactness) -> Exactness {
        if self == Exactness::Exact && other == Exactness::Exact {
            Exactness::Exact
        } else {
            Exactness::Heuristic
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Warning {
    /// A value relied on multiprecision numerics that were not fully
    /// certified afterwards.
    HeuristicReliance { context: String, precision_bits: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::HeuristicReliance {
                context,
                precision_bits,
            } => {
                write!(f, "heuristic ({precision_bits} bits): {context}")
            }
        }
    }
}

/// Settings of the numeric stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heuristics {
    pub precision_bits: usize,
}

pub const DEFAULT_PRECISION_BITS: usize = 200;

impl Default for Heuristics {
    /// 200 bits, or `NILSHADOW_PRECISION_BITS` when set.
    fn default() -> Self {
        let precision_bits = std::env::var("NILSHADOW_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_PRECISION_BITS);
        Heuristics { precision_bits }
    }
}
