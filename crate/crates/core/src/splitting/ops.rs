//! Nilradical, semisimple parts, fixed groups, the minimal splitting and
//! the homomorphism `β`, the nil-shadow model, and the covering checks.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::exactlin::{is_semisimple, semisimple_factor, IntMatrix, Rat, RatMatrix};

use super::conjugacy::semisimple_aut;
use super::model::{Base, GroupModel, ModelAut, ModelElement};
use super::relations::{power_product, relation_lattice, RelationLattice};
use super::{Exactness, Heuristics, SplittingError, Warning};

/// A subgroup `(base part) ⋊ (exponent sublattice)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgroupData {
    /// Column basis of the base part.
    pub base_subspace: RatMatrix,
    /// Integer points of the base part (rows), for discrete bases.
    pub base_lattice: Option<IntMatrix>,
    /// Exponent sublattice (rows).
    pub exponent_lattice: IntMatrix,
}

impl SubgroupData {
    pub fn base_dim(&self) -> usize {
        self.base_subspace.cols()
    }

    pub fn contains(&self, x: &ModelElement) -> bool {
        let base_ok = if self.base_subspace.cols() == 0 {
            x.base.iter().all(|v| v.is_zero())
        } else {
            self.base_subspace.spans(&x.base)
        };
        let lattice_ok = self.base_lattice.is_none() || x.base.iter().all(|v| v.is_integer());
        base_ok && lattice_ok && super::relations::lattice_contains(&self.exponent_lattice, &x.exponent)
    }
}

fn integer_points(space: &RatMatrix, equations: &[RatMatrix], n: usize) -> IntMatrix {
    if space.cols() == 0 {
        return IntMatrix::zeros(0, n);
    }
    if equations.is_empty() {
        return IntMatrix::identity(n);
    }
    let mut rows = Vec::new();
    for e in equations {
        for r in 0..e.rows() {
            let row = e.row(r);
            let l = row
                .iter()
                .fold(BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            rows.push(
                row.iter()
                    .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
                    .collect(),
            );
        }
    }
    IntMatrix::from_rows(rows, n).integer_kernel()
}

/// `G_𝒞 = { (v, m) : C v = v for all C ∈ 𝒞 }` for commuting linear
/// automorphisms `(C, 0)`; the exponent part is all of `ℤ^k`. On discrete
/// bases the integer points of the fixed space are reported exactly.
pub fn fixed_group(model: &GroupModel, family: &[RatMatrix]) -> Result<SubgroupData, SplittingError> {
    let n = model.base_dim();
    let mut space = RatMatrix::identity(n);
    let mut equations = Vec::with_capacity(family.len());
    for c in family {
        if c.rows() != n || !c.is_square() {
            return Err(SplittingError::Shape("automorphism has the wrong size".into()));
        }
        if model.actions().iter().any(|a| !a.commutes_with(c)) {
            return Err(SplittingError::NotAnAutomorphism(
                "family member does not commute with the actions".into(),
            ));
        }
        let d = c - &RatMatrix::identity(n);
        space = space.span_intersection(&d.kernel());
        equations.push(d);
    }
    let base_lattice = model
        .base()
        .is_discrete()
        .then(|| integer_points(&space, &equations, n));
    Ok(SubgroupData {
        base_subspace: space,
        base_lattice,
        exponent_lattice: IntMatrix::identity(model.rank()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Nilradical {
    pub subgroup: SubgroupData,
    pub relations: RelationLattice,
}

/// `N = B ⋊ Λ`, `Λ` the exponents whose action has trivial semisimple part.
pub fn nilradical(model: &GroupModel, heur: &Heuristics) -> Result<Nilradical, SplittingError> {
    let relations = relation_lattice(&model.semisimple_parts(), heur)?;
    let n = model.base_dim();
    let k = model.rank();
    let exponent_lattice = if k == 0 {
        IntMatrix::zeros(0, 0)
    } else {
        relations.basis.clone()
    };
    Ok(Nilradical {
        subgroup: SubgroupData {
            base_subspace: RatMatrix::identity(n),
            base_lattice: model.base().is_discrete().then(|| IntMatrix::identity(n)),
            exponent_lattice,
        },
        relations,
    })
}

/// Matrix of `s(ι_x)` on the base: the semisimple factor of `Ad(v) A^m`.
pub fn semisimple_part(model: &GroupModel, x: &ModelElement) -> Result<RatMatrix, SplittingError> {
    Ok(semisimple_factor(&model.inner_base_matrix(x))?)
}

/// Whether `(θ, 0)` is a semisimple automorphism, i.e. semisimple on the
/// identity component with `G = G⁰ G_θ`. On a real base `G⁰ = B` and the
/// exponent generators are fixed, so this is semisimplicity of `θ`; on a
/// discrete base `G⁰` is trivial and `θ` must be the identity.
pub fn check_semisimple_aut(model: &GroupModel, theta: &RatMatrix) -> Result<bool, SplittingError> {
    let n = model.base_dim();
    if theta.rows() != n || !theta.is_square() {
        return Err(SplittingError::Shape(format!(
            "automorphism is {}x{}, base has dimension {n}",
            theta.rows(),
            theta.cols()
        )));
    }
    let t = ModelAut::linear(theta.clone(), model.rank());
    if !theta.is_invertible() || !model.is_model_automorphism(&t) {
        return Err(SplittingError::NotAnAutomorphism(
            "matrix does not define an automorphism of the model".into(),
        ));
    }
    if model.base().is_discrete() {
        Ok(theta.is_identity())
    } else {
        Ok(is_semisimple(theta))
    }
}

/// Outcome of trying to enlarge the family by further semisimple parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityCertificate {
    /// `dim(G_𝒞 ∩ B)`.
    pub fixed_dim: usize,
    pub candidates_checked: usize,
    /// Candidates whose semisimple part commutes with the whole family.
    pub commuting_candidates: usize,
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplittingData {
    /// `𝒞₀ = {(A_i)_s}`, generators of the commuting family.
    pub family: Vec<RatMatrix>,
    /// `L = G_𝒞`.
    pub l: SubgroupData,
    pub nilradical: Nilradical,
    /// `β(0, e_i) = (A_i)_s`.
    pub beta_generators: Vec<RatMatrix>,
    pub minimality: MinimalityCertificate,
    pub exactness: Exactness,
    pub warnings: Vec<Warning>,
}

fn exponent_box(k: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k.min(3) {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    for v in out.iter_mut() {
        v.resize(k, 0);
    }
    out
}

fn minimality(
    model: &GroupModel,
    family: &[RatMatrix],
    fixed: &RatMatrix,
) -> Result<MinimalityCertificate, SplittingError> {
    let n = model.base_dim();
    let k = model.rank();
    let gens: Vec<ModelAut> = family.iter().map(|c| ModelAut::linear(c.clone(), k)).collect();
    let mut bases = vec![vec![Rat::zero(); n]];
    for i in 0..n {
        let mut v = vec![Rat::zero(); n];
        v[i] = Rat::from_integer(1.into());
        bases.push(v);
    }
    let mut checked = 0;
    let mut commuting = 0;
    let mut minimal = true;
    for m in exponent_box(k) {
        for v in &bases {
            let x = model.element(v.clone(), m.clone());
            let sx = semisimple_aut(model, &x)?;
            checked += 1;
            let commutes = gens
                .iter()
                .all(|g| model.aut_compose(g, &sx) == model.aut_compose(&sx, g));
            if !commutes {
                continue;
            }
            commuting += 1;
            let d = &sx.base_map - &RatMatrix::identity(n);
            if fixed.span_intersection(&d.kernel()).cols() < fixed.cols() {
                minimal = false;
            }
        }
    }
    Ok(MinimalityCertificate {
        fixed_dim: fixed.cols(),
        candidates_checked: checked,
        commuting_candidates: commuting,
        minimal,
    })
}

/// The splitting attached to the generator semisimple parts: the family
/// `𝒞₀`, its fixed group `L`, the nilradical and `β`.
pub fn minimal_splitting(model: &GroupModel, heur: &Heuristics) -> Result<SplittingData, SplittingError> {
    let family = model.semisimple_parts();
    let l = fixed_group(model, &family)?;
    let nil = nilradical(model, heur)?;
    let minimality = minimality(model, &family, &l.base_subspace)?;
    Ok(SplittingData {
        beta_generators: family.clone(),
        family,
        l,
        exactness: nil.relations.exactness,
        warnings: nil.relations.warnings.clone(),
        nilradical: nil,
        minimality,
    })
}

/// `β(v, m) = Π (A_i)_s^{m_i}`.
pub fn beta(splitting: &SplittingData, x: &ModelElement) -> Result<RatMatrix, SplittingError> {
    let m: Vec<BigInt> = x.exponent.iter().map(|&e| BigInt::from(e)).collect();
    power_product(&splitting.beta_generators, &m)
}

/// `θ` has trivial cocycle and base map `Π C_i^{w_i}` for the witness `w`.
pub fn in_c_family(splitting: &SplittingData, theta: &ModelAut, witness: &[i64]) -> Result<bool, SplittingError> {
    if !theta.has_trivial_cocycle() {
        return Ok(false);
    }
    let m: Vec<BigInt> = witness.iter().map(|&e| BigInt::from(e)).collect();
    Ok(power_product(&splitting.family, &m)? == theta.base_map)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NilShadowModel {
    pub model: GroupModel,
    /// The unipotent parts do not preserve the integer lattice, so the
    /// base was replaced by its real completion.
    pub real_completion: bool,
}

/// Same base with each action replaced by its unipotent part.
pub fn nilshadow_model(model: &GroupModel) -> Result<NilShadowModel, SplittingError> {
    let unip = model.unipotent_parts();
    let integral = unip
        .iter()
        .all(|u| u.is_integral() && u.inverse().map(|i| i.is_integral()).unwrap_or(false));
    let (base, real_completion) = match model.base() {
        Base::Lattice(n) if !integral => (Base::Real(*n), true),
        Base::Nil { algebra, lattice: true } if !integral => (
            Base::Nil {
                algebra: algebra.clone(),
                lattice: false,
            },
            true,
        ),
        other => (other.clone(), false),
    };
    Ok(NilShadowModel {
        model: GroupModel::new(base, unip)?,
        real_completion,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub nilradical: SubgroupData,
    pub l: SubgroupData,
    /// `true` when the identity component `N⁰` was used (real bases);
    /// on discrete bases the product `N L` is checked instead.
    pub identity_component: bool,
    pub covers: bool,
    pub exactness: Exactness,
}

/// Checks `G = N⁰ L` (real bases) or `G = N L` (discrete bases).
pub fn structure_decomposition(model: &GroupModel, heur: &Heuristics) -> Result<Decomposition, SplittingError> {
    let split = minimal_splitting(model, heur)?;
    let n = model.base_dim();
    let k = model.rank();
    let nil = split.nilradical.subgroup.clone();
    let identity_component = !model.base().is_discrete();
    let base_cover = nil.base_subspace.span_sum(&split.l.base_subspace).cols() == n;
    // exponents: N⁰ contributes nothing, N contributes Λ
    let mut rows: Vec<Vec<BigInt>> = (0..split.l.exponent_lattice.rows())
        .map(|i| split.l.exponent_lattice.row(i))
        .collect();
    if !identity_component {
        rows.extend((0..nil.exponent_lattice.rows()).map(|i| nil.exponent_lattice.row(i)));
    }
    let exp_cover = if k == 0 {
        true
    } else if rows.is_empty() {
        false
    } else {
        let h = IntMatrix::from_rows(rows, k).row_lattice_basis();
        h.rows() == k && h.lattice_index() == Some(BigInt::from(1))
    };
    Ok(Decomposition {
        nilradical: nil,
        l: split.l,
        identity_component,
        covers: base_cover && exp_cover,
        exactness: split.exactness,
    })
}

/// `im((A − I)²) + ker(A_s − I)` is the whole space.
pub fn image_identity_holds(a: &RatMatrix) -> Result<bool, SplittingError> {
    let n = a.rows();
    let d = a - &RatMatrix::identity(n);
    let im = (&d * &d).image();
    let s = semisimple_factor(a)?;
    let ker = (&s - &RatMatrix::identity(n)).kernel();
    Ok(im.span_sum(&ker).cols() == n)
}

/// Whether adjoining `x` to `L` produces a non-nilpotent group. The
/// generated group lives in `exp(W) ⋊ ℤ^k` with `W` the smallest
/// action-invariant subalgebra containing the base part of `L` and of `x`,
/// and its base intersection spans `W`; it is nilpotent iff every action
/// is unipotent on `W`.
pub fn breaks_nilpotency(model: &GroupModel, l: &SubgroupData, x: &ModelElement) -> Result<bool, SplittingError> {
    let n = model.base_dim();
    let mut w = l.base_subspace.clone();
    if x.base.iter().any(|v| !v.is_zero()) {
        w = w.span_sum(&RatMatrix::from_columns(&[x.base.clone()]));
    }
    loop {
        let before = w.cols();
        if before == 0 {
            break;
        }
        let mut cols = w.columns();
        for a in model.actions() {
            cols.extend(w.columns().iter().map(|c| a.apply(c)));
        }
        let basis = w.columns();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                cols.push(model.algebra().bracket(&basis[i], &basis[j]));
            }
        }
        w = RatMatrix::from_columns(&cols).image();
        if w.cols() == before {
            break;
        }
    }
    if w.cols() == 0 {
        return Ok(false);
    }
    for a in model.actions() {
        let r = a
            .restrict(&w)
            .ok_or_else(|| SplittingError::Shape("closure is not invariant".into()))?;
        if !r.is_unipotent() {
            return Ok(true);
        }
    }
    let _ = n;
    Ok(false)
}
