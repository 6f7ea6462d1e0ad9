//! Invariant data extracted from a hull: growth degree, the description of
//! `G_an = G K₁`, the invariant report and the two compactness and
//! commutator equivalences.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactlin::{nilpotent_log, IntMatrix, Rat, RatMatrix};
use crate::nilpotent::{faithful_unipotent_rep, group_image, malcev_completion, LieAlgebra, NilLieAlgebra};
use crate::splitting::ops::{beta, minimal_splitting, nilradical, nilshadow_model};
use crate::splitting::relations::{lattice_contains, power_product};
use crate::splitting::{Exactness, GroupModel, Heuristics, ModelElement};

use super::construct::HullData;
use super::HullError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub nilshadow_dim: usize,
    /// Dimensions of the lower central quotients of `Ñ`.
    pub lcs_dims: Vec<usize>,
    pub guivarch_degree: usize,
    pub torus_rank: usize,
    pub finite_component_order: u64,
    pub m_tilde_dim: usize,
    pub exactness: Exactness,
}

pub fn hull_invariants(hull: &HullData) -> InvariantReport {
    InvariantReport {
        nilshadow_dim: hull.dim(),
        lcs_dims: hull.nilshadow.series().quotient_dims(),
        guivarch_degree: hull.nilshadow.guivarch_degree(),
        torus_rank: hull.compact_part.torus_rank,
        finite_component_order: hull.compact_part.finite_order(),
        m_tilde_dim: hull.m_tilde_dim,
        exactness: hull.exactness,
    }
}

/// Polynomial growth degree of the model, read off the hull's nil-shadow.
pub fn growth_degree(hull: &HullData) -> usize {
    hull.nilshadow.guivarch_degree()
}

fn unit(size: usize, r: usize, c: usize) -> RatMatrix {
    let mut m = RatMatrix::identity(size);
    m[(r, c)] = Rat::one();
    m
}

/// Growth degree computed independently of the hull: the nil-shadow model
/// is realized by unipotent matrices and its Malcev completion is built
/// from them. Abelian bases use the affine matrices `[[U^m, v], [0, 1]]`
/// with one `2 × 2` Jordan block per exponent generator; nilpotent bases
/// go through a faithful unipotent representation of the semidirect
/// product algebra.
pub fn growth_degree_via_matrices(model: &GroupModel) -> Result<usize, HullError> {
    let shadow = nilshadow_model(model)?.model;
    let n = shadow.base_dim();
    let k = shadow.rank();
    let gens: Vec<RatMatrix> = if shadow.is_abelian_base() {
        let size = n + 1 + 2 * k;
        let mut g: Vec<RatMatrix> = (0..n).map(|j| unit(size, j, n)).collect();
        for (i, u) in shadow.actions().iter().enumerate() {
            let block = u.block_diag(&RatMatrix::identity(1));
            let jordan = unit(2 * k, 2 * i, 2 * i + 1);
            g.push(block.block_diag(&jordan));
        }
        g
    } else {
        let logs = shadow
            .actions()
            .iter()
            .map(nilpotent_log)
            .collect::<Result<Vec<_>, _>>()?;
        let alg = NilLieAlgebra::new(shadow.algebra().algebra().extend_by_derivations(&logs)?)?;
        let images = faithful_unipotent_rep(&alg)?;
        (0..alg.dim())
            .map(|j| group_image(&images, &alg.algebra().basis_vector(j)))
            .collect()
    };
    if gens.is_empty() {
        return Ok(0);
    }
    Ok(malcev_completion(&gens)?.algebra.guivarch_degree())
}

/// Structural description of `G_an = G K₁`, `K₁` the identity component
/// of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GanDescription {
    pub model: String,
    pub k1_torus_rank: usize,
    pub equals_g: bool,
    /// The nilpotent normal subgroup `N_an`.
    pub nan: String,
    pub label: String,
    pub finite_orders: Vec<u64>,
    /// `G ∩ N_an` is the nilradical of `G`.
    pub meets_g_in_nilradical: bool,
    pub exactness: Exactness,
}

fn cyclic_product(orders: &[u64]) -> String {
    orders.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
}

pub fn g_an(model: &GroupModel, hull: &HullData, heur: &Heuristics) -> Result<GanDescription, HullError> {
    let closure = &hull.compact_part;
    let k = model.rank();
    let nil = nilradical(model, heur)?;
    let lambda = &nil.relations.basis;
    // every relation acts trivially, lies in the torsion relations, and
    // exhausts them when there is no free part
    let semisimple = model.semisimple_parts();
    let mut meets = true;
    for r in 0..lambda.rows() {
        let row = lambda.row(r);
        if !power_product(&semisimple, &row)?.is_identity() {
            meets = false;
        }
        let small: Vec<i64> = row.iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect();
        if k > 0 && !lattice_contains(&closure.torsion_lattice, &small) {
            meets = false;
        }
    }
    if k > 0
        && nil.relations.free_space.cols() == 0
        && lambda.row_lattice_basis() != closure.torsion_lattice.row_lattice_basis()
    {
        meets = false;
    }
    let z = if k == 1 { "Z".to_string() } else { format!("Z^{k}") };
    let twisted = hull.derivations.iter().any(|d| !d.is_zero());
    let op = if twisted { "x|" } else { "x" };
    let nan = if k == 0 {
        model.base().label()
    } else {
        format!("({} {op} {z})", model.base().label())
    };
    let equals_g = closure.torus_rank == 0;
    let label = if equals_g {
        "G_an = G".to_string()
    } else if closure.finite_orders.is_empty() {
        format!("{nan} x| K")
    } else {
        format!("({nan} x| K1) . {}", cyclic_product(&closure.finite_orders))
    };
    Ok(GanDescription {
        model: model.label(),
        k1_torus_rank: closure.torus_rank,
        equals_g,
        nan,
        label,
        finite_orders: closure.finite_orders.clone(),
        meets_g_in_nilradical: meets,
        exactness: hull.exactness.and(nil.relations.exactness),
    })
}

/// Both sides of the two equivalences: `K` abelian iff `[G, G] ⊆ N`, and
/// `G/N` compact iff `Ñ/N` compact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub k_abelian: bool,
    pub commutators_in_n: bool,
    pub g_mod_n_compact: bool,
    pub nilshadow_mod_n_compact: bool,
    pub exactness: Exactness,
}

fn lie_closure(alg: &LieAlgebra, span: RatMatrix) -> RatMatrix {
    let mut s = span.image();
    loop {
        let next = s.span_sum(&alg.bracket_span(&s, &s));
        if next.cols() == s.cols() {
            return s;
        }
        s = next;
    }
}

fn generators(model: &GroupModel) -> Vec<ModelElement> {
    let mut out = Vec::new();
    for j in 0..model.base_dim() {
        let mut v = vec![Rat::zero(); model.base_dim()];
        v[j] = Rat::one();
        out.push(model.base_element(v));
    }
    out.extend((0..model.rank()).map(|i| model.generator(i)));
    out
}

pub fn check_equivalences(
    model: &GroupModel,
    hull: &HullData,
    heur: &Heuristics,
) -> Result<EquivalenceReport, HullError> {
    let acts = &hull.action_of_k;
    let k_abelian = acts
        .iter()
        .enumerate()
        .all(|(i, a)| acts[i + 1..].iter().all(|b| a.commutes_with(b)));

    let splitting = minimal_splitting(model, heur)?;
    let mut elems = generators(model);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e9);
    elems.extend((0..6).map(|_| model.random_element(&mut rng, 3, 2)));
    let mut commutators_in_n = true;
    'outer: for x in &elems {
        for y in &elems {
            let c = model.commutator(x, y);
            let embedded = hull.embed(&c);
            if embedded.k_word.iter().any(|&e| e != 0) || !beta(&splitting, &c)?.is_identity() {
                commutators_in_n = false;
                break 'outer;
            }
        }
    }
    if k_abelian != commutators_in_n {
        return Err(HullError::EquivalenceViolation(format!(
            "K abelian is {k_abelian} but commutators in N is {commutators_in_n}"
        )));
    }

    let lambda = &splitting.nilradical.relations.basis;
    let k = model.rank();
    let g_mod_n_compact = lambda.rows() == k;
    let mut span = hull.embedding.base_map.clone();
    if lambda.rows() > 0 {
        let lam = IntMatrix::from_rows(
            (0..lambda.rows()).map(|r| lambda.row(r)).collect::<Vec<Vec<BigInt>>>(),
            k,
        )
        .to_rat()
        .transpose();
        span = span.hstack(&(&hull.embedding.exponent_map * &lam));
    }
    let closure = lie_closure(hull.nilshadow.algebra(), span);
    let nilshadow_mod_n_compact = closure.cols() == hull.dim();
    if g_mod_n_compact != nilshadow_mod_n_compact {
        return Err(HullError::EquivalenceViolation(format!(
            "G/N compact is {g_mod_n_compact} but nil-shadow mod N compact is {nilshadow_mod_n_compact}"
        )));
    }
    Ok(EquivalenceReport {
        k_abelian,
        commutators_in_n,
        g_mod_n_compact,
        nilshadow_mod_n_compact,
        exactness: splitting.exactness,
    })
}
