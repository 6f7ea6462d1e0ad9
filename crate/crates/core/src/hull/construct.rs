//! The hull `G̃ = Ñ ⋊ K`: `Ñ` is the base extended by the logs of the
//! unipotent parts, `K` the closure of the semisimple parts acting by
//! `S ⊕ I` on `Ñ`, and `G` sits inside through
//! `(v, m) ↦ (v ∗ exp(Σ m_i f_i), S^m)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactlin::rat::serde_rat_vec;
use crate::exactlin::{nilpotent_log, rat, spectrum_certificate, Rat, RatMatrix};
use crate::nilpotent::{AlgebraElement, NilLieAlgebra};
use crate::splitting::relations::finite_relations;
use crate::splitting::{Exactness, GroupModel, Heuristics, ModelElement, SplittingError, Warning};

use super::closure::{compact_closure, ClosureDescription};
use super::HullError;

/// Linear part of the embedding `ℝ^n ⊕ ℝ^k → Ñ`, stored as data so that
/// it can be inspected and deliberately corrupted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Embedding {
    pub base_map: RatMatrix,
    pub exponent_map: RatMatrix,
}

/// `(a, κ)` with `a ∈ Ñ` in exponential coordinates and `κ` a word in the
/// generators of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HullElement {
    #[serde(with = "serde_rat_vec")]
    pub nil: AlgebraElement,
    pub k_word: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullData {
    pub base_dim: usize,
    pub exponent_rank: usize,
    pub nilshadow: NilLieAlgebra,
    /// `B_i = log (A_i)_u`, acting as `[f_i, e_j] = B_i e_j`.
    pub derivations: Vec<RatMatrix>,
    pub compact_part: ClosureDescription,
    /// Matrix of each generator of `K` acting on `Ñ`.
    pub action_of_k: Vec<RatMatrix>,
    pub embedding: Embedding,
    /// Dimension of the `K`-fixed subalgebra `M̃`.
    pub m_tilde_dim: usize,
    pub exactness: Exactness,
    pub warnings: Vec<Warning>,
}

impl HullData {
    pub fn dim(&self) -> usize {
        self.nilshadow.dim()
    }

    pub fn identity(&self) -> HullElement {
        HullElement {
            nil: self.nilshadow.zero(),
            k_word: vec![0; self.action_of_k.len()],
        }
    }

    /// `Π a_j^{κ_j}` on `Ñ`.
    pub fn k_matrix(&self, word: &[i64]) -> RatMatrix {
        let mut out = RatMatrix::identity(self.dim());
        for (a, &e) in self.action_of_k.iter().zip(word) {
            if e != 0 {
                out = &out * &a.pow(e).expect("K acts invertibly");
            }
        }
        out
    }

    /// `(a, κ)(b, κ') = (a ∗ κ·b, κ + κ')`.
    pub fn mul(&self, x: &HullElement, y: &HullElement) -> HullElement {
        let moved = self.k_matrix(&x.k_word).apply(&y.nil);
        HullElement {
            nil: self.nilshadow.mul(&x.nil, &moved),
            k_word: x.k_word.iter().zip(&y.k_word).map(|(a, b)| a + b).collect(),
        }
    }

    /// `(a, κ)⁻¹ = (κ⁻¹·(−a), −κ)`.
    pub fn inv(&self, x: &HullElement) -> HullElement {
        let neg: Vec<i64> = x.k_word.iter().map(|e| -e).collect();
        let minus: Vec<Rat> = x.nil.iter().map(|v| -v.clone()).collect();
        HullElement {
            nil: self.k_matrix(&neg).apply(&minus),
            k_word: neg,
        }
    }

    pub fn embed(&self, x: &ModelElement) -> HullElement {
        let v = self.embedding.base_map.apply(&x.base);
        let m: Vec<Rat> = x.exponent.iter().map(|&e| Rat::from_integer(e.into())).collect();
        let f = self.embedding.exponent_map.apply(&m);
        let mut k_word = vec![0; self.action_of_k.len()];
        k_word[..x.exponent.len()].copy_from_slice(&x.exponent);
        HullElement {
            nil: self.nilshadow.mul(&v, &f),
            k_word,
        }
    }
}

fn fixed_dim(actions: &[RatMatrix], dim: usize) -> usize {
    let mut space = RatMatrix::identity(dim);
    for a in actions {
        let shifted = a - &RatMatrix::identity(dim);
        space = space.span_intersection(&shifted.kernel());
    }
    space.cols()
}

/// Builds `Ñ ⋊ K` for a polynomial-growth model.
pub fn algebraic_hull(model: &GroupModel, heur: &Heuristics) -> Result<HullData, HullError> {
    model.polynomial_growth().map_err(|e| match e {
        SplittingError::NotPolynomialGrowth(d) => HullError::NotPolynomialGrowth(d),
        other => HullError::Splitting(other),
    })?;
    let n = model.base_dim();
    let k = model.rank();
    let derivations = model
        .unipotent_parts()
        .iter()
        .map(nilpotent_log)
        .collect::<Result<Vec<_>, _>>()?;
    let extended = model.algebra().algebra().extend_by_derivations(&derivations)?;
    let nilshadow = NilLieAlgebra::new(extended)?;
    let semisimple = model.semisimple_parts();
    let compact_part = if k == 0 {
        compact_closure(&[], heur)?
    } else {
        compact_closure(&semisimple, heur)?
    };
    let action_of_k: Vec<RatMatrix> = semisimple
        .iter()
        .map(|s| s.block_diag(&RatMatrix::identity(k)))
        .collect();
    let embedding = Embedding {
        base_map: RatMatrix::identity(n).vstack(&RatMatrix::zeros(k, n)),
        exponent_map: RatMatrix::zeros(n, k).vstack(&RatMatrix::identity(k)),
    };
    let m_tilde_dim = fixed_dim(&action_of_k, n + k);
    Ok(HullData {
        base_dim: n,
        exponent_rank: k,
        nilshadow,
        derivations,
        exactness: compact_part.exactness,
        warnings: compact_part.warnings.clone(),
        compact_part,
        action_of_k,
        embedding,
        m_tilde_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullVerification {
    pub homomorphism: bool,
    pub automorphisms: bool,
    pub faithful: bool,
    pub dense: bool,
    pub cocompact: bool,
    pub failures: Vec<String>,
}

impl HullVerification {
    pub fn all_pass(&self) -> bool {
        self.homomorphism && self.automorphisms && self.faithful && self.dense && self.cocompact
    }
}

fn sample_elements(model: &GroupModel, seed: u64) -> Vec<ModelElement> {
    let mut out = Vec::new();
    for j in 0..model.base_dim() {
        let mut v = vec![Rat::zero(); model.base_dim()];
        v[j] = Rat::one();
        out.push(model.base_element(v));
    }
    for i in 0..model.rank() {
        out.push(model.generator(i));
    }
    let gens = out.clone();
    for g in gens {
        out.push(model.inv(&g));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..12 {
        out.push(model.random_element(&mut rng, 3, 2));
    }
    out
}

/// Some injective `J` with `a_j J = J g_j` for every generator, i.e. the
/// intrinsic representation of `K` factors through its action on `Ñ`.
fn has_injective_intertwiner(hull: &HullData) -> bool {
    let gens = &hull.compact_part.generators;
    let Some(first) = gens.first() else {
        return true;
    };
    let m = first.rows();
    let big = hull.dim();
    if m == 0 {
        return true;
    }
    let mut rows = Vec::new();
    for (g, a) in gens.iter().zip(&hull.action_of_k) {
        for r in 0..big {
            for c in 0..m {
                let mut row = vec![Rat::zero(); big * m];
                for s in 0..big {
                    row[s * m + c] += &a[(r, s)];
                }
                for s in 0..m {
                    row[r * m + s] -= &g[(s, c)];
                }
                rows.push(row);
            }
        }
    }
    let system = RatMatrix::from_rows(rows).expect("rectangular");
    let kernel = system.kernel();
    let sols: Vec<RatMatrix> = kernel
        .columns()
        .into_iter()
        .map(|col| RatMatrix::from_vec(big, m, col))
        .collect();
    if sols.is_empty() {
        return false;
    }
    // a generic combination has maximal rank
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e7);
    (0..24).any(|_| {
        let acc = sols.iter().fold(RatMatrix::zeros(big, m), |acc, s| {
            &acc + &s.scale(&Rat::from_integer(rng.gen_range(-9i64..=9).into()))
        });
        acc.rank() == m
    })
}

/// Checks the hull postconditions: the embedding is a homomorphism on
/// sampled words, `K` acts by commuting automorphisms and faithfully, the
/// image of `G` projects densely onto `K` and spans `Ñ`.
pub fn verify_hull(model: &GroupModel, hull: &HullData, seed: u64) -> HullVerification {
    let mut failures = Vec::new();
    let samples = sample_elements(model, seed);
    let mut homomorphism = true;
    'outer: for x in &samples {
        for y in samples.iter().take(2 * (model.base_dim() + model.rank()) + 4) {
            let lhs = hull.embed(&model.mul(x, y));
            let rhs = hull.mul(&hull.embed(x), &hull.embed(y));
            if lhs != rhs {
                failures.push(format!("embedding is not multiplicative on {x} and {y}"));
                homomorphism = false;
                break 'outer;
            }
        }
        if hull.embed(&model.inv(x)) != hull.inv(&hull.embed(x)) {
            failures.push(format!("embedding does not preserve the inverse of {x}"));
            homomorphism = false;
            break;
        }
    }

    let mut automorphisms = true;
    for (j, a) in hull.action_of_k.iter().enumerate() {
        if !hull.nilshadow.is_automorphism(a).unwrap_or(false) {
            failures.push(format!("generator {j} of K is not an automorphism of the nil-shadow"));
            automorphisms = false;
        }
        for b in &hull.action_of_k[j + 1..] {
            if !a.commutes_with(b) {
                failures.push(format!("generator {j} of K does not commute with the others"));
                automorphisms = false;
            }
        }
    }

    let faithful = has_injective_intertwiner(hull);
    if !faithful {
        failures.push("K does not act faithfully on the nil-shadow".into());
    }

    let closure = &hull.compact_part;
    let mut dense = true;
    if closure.torus_rank > 0 {
        let irrational = closure
            .generators
            .iter()
            .any(|g| spectrum_certificate(g).map(|c| !c.is_torsion()).unwrap_or(false));
        if !irrational {
            failures.push("torus part has no non-torsion generator".into());
            dense = false;
        }
    }
    if closure.torsion_space.cols() > 0 && !closure.generators.is_empty() {
        let restricted: Option<Vec<RatMatrix>> = closure
            .generators
            .iter()
            .map(|g| g.restrict(&closure.torsion_space))
            .collect();
        let order = restricted
            .and_then(|r| finite_relations(&r).ok())
            .and_then(|l| l.lattice_index());
        if order != Some(BigInt::from(closure.finite_order())) {
            failures.push("generators do not generate the finite part".into());
            dense = false;
        }
    } else if closure.finite_order() != 1 {
        failures.push("finite part without a torsion subspace".into());
        dense = false;
    }

    let span = hull.embedding.base_map.hstack(&hull.embedding.exponent_map);
    let mut cocompact = span.rank() == hull.dim() && hull.dim() == hull.base_dim + hull.exponent_rank;
    if model.base().is_discrete() && hull.embedding.base_map.rank() != hull.base_dim {
        cocompact = false;
    }
    if !cocompact {
        failures.push("embedded group does not span the nil-shadow".into());
    }

    HullVerification {
        homomorphism,
        automorphisms,
        faithful,
        dense,
        cocompact,
        failures,
    }
}

/// Negative control: `K` enlarged by a rotation factor that acts
/// trivially on `Ñ`.
pub fn pad_compact_part(hull: &HullData) -> HullData {
    let mut out = hull.clone();
    let rotation = RatMatrix::from_rows(vec![vec![rat(3, 5), rat(-4, 5)], vec![rat(4, 5), rat(3, 5)]]).expect("square");
    let m = hull.compact_part.generators.first().map_or(hull.base_dim, |g| g.rows());
    let c = &mut out.compact_part;
    c.generators = c
        .generators
        .iter()
        .map(|g| g.block_diag(&RatMatrix::identity(2)))
        .collect();
    c.generators.push(RatMatrix::identity(m).block_diag(&rotation));
    c.certificates = c
        .generators
        .iter()
        .map(|g| spectrum_certificate(g).expect("square"))
        .collect();
    c.torsion_space = c.torsion_space.vstack(&RatMatrix::zeros(2, c.torsion_space.cols()));
    c.torus_rank += 1;
    out.action_of_k.push(RatMatrix::identity(hull.dim()));
    out
}

/// Negative control: one coordinate of the embedding altered.
pub fn corrupt_embedding(hull: &HullData) -> HullData {
    let mut out = hull.clone();
    if out.embedding.base_map.rows() > 0 && out.embedding.base_map.cols() > 0 {
        out.embedding.base_map[(0, 0)] += Rat::one();
    } else if out.embedding.exponent_map.rows() > 0 && out.embedding.exponent_map.cols() > 0 {
        out.embedding.exponent_map[(0, 0)] += Rat::one();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn cos35() -> GroupModel {
        GroupModel::real(
            2,
            vec![RatMatrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(6, 5)]]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn cos35_hull() {
        let m = cos35();
        let h = algebraic_hull(&m, &Heuristics::default()).unwrap();
        assert_eq!(h.dim(), 3);
        assert!(h.nilshadow.is_abelian());
        assert_eq!(h.compact_part.torus_rank, 1);
        assert_eq!(h.m_tilde_dim, 1);
        assert!(verify_hull(&m, &h, 0).all_pass());
    }

    #[test]
    fn unipotent_hull_is_heisenberg() {
        let m = GroupModel::lattice(2, vec![RatMatrix::from_i64(&[&[1, 1], &[0, 1]])]).unwrap();
        let h = algebraic_hull(&m, &Heuristics::default()).unwrap();
        assert!(h.compact_part.is_trivial());
        assert_eq!(h.nilshadow.series().quotient_dims(), vec![2, 1]);
        assert_eq!(h.m_tilde_dim, 3);
        let v = verify_hull(&m, &h, 1);
        assert!(v.all_pass(), "{:?}", v.failures);
    }

    #[test]
    fn negative_controls() {
        let m = cos35();
        let h = algebraic_hull(&m, &Heuristics::default()).unwrap();
        let padded = verify_hull(&m, &pad_compact_part(&h), 0);
        assert!(!padded.faithful);
        assert!(padded.homomorphism);
        let corrupt = verify_hull(&m, &corrupt_embedding(&h), 0);
        assert!(!corrupt.homomorphism);
    }

    #[test]
    fn rejects_exponential_growth() {
        let m = GroupModel::lattice(2, vec![RatMatrix::from_i64(&[&[2, 1], &[1, 1]])]).unwrap();
        assert!(matches!(
            algebraic_hull(&m, &Heuristics::default()),
            Err(HullError::NotPolynomialGrowth(_))
        ));
    }
}
