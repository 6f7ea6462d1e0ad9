//! Group models `B ⋊ ℤ^k` with commuting action matrices, their
//! elements, and automorphisms given by a base map plus a cocycle.

use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactlin::jordan::MultiplicativeJordan;
use crate::exactlin::rat::{serde_rat_vec, RatVec};
use crate::exactlin::{
    int, jordan_chevalley_multiplicative, rat, spectrum_certificate, IntMatrix, Rat, RatMatrix, SpectrumCertificate,
};
use crate::nilpotent::{AlgebraElement, LieAlgebra, NilLieAlgebra, StructureEntry};

use super::SplittingError;

/// The normal subgroup `B` of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    /// `ℝⁿ`
    Real(usize),
    /// `ℤⁿ`
    Lattice(usize),
    /// A simply connected nilpotent group in exponential coordinates;
    /// `lattice` marks the discrete case (integer coordinates).
    Nil { algebra: NilLieAlgebra, lattice: bool },
}

impl Base {
    pub fn dim(&self) -> usize {
        match self {
            Base::Real(n) | Base::Lattice(n) => *n,
            Base::Nil { algebra, .. } => algebra.dim(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Base::Lattice(_) | Base::Nil { lattice: true, .. })
    }

    pub fn label(&self) -> String {
        match self {
            Base::Real(n) => format!("R^{n}"),
            Base::Lattice(n) => format!("Z^{n}"),
            Base::Nil { algebra, lattice } => {
                let kind = if *lattice { "Gamma" } else { "N" };
                format!("{kind}_{}", algebra.dim())
            }
        }
    }
}

/// `(base part, exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelElement {
    #[serde(with = "serde_rat_vec")]
    pub base: AlgebraElement,
    pub exponent: Vec<i64>,
}

impl std::fmt::Display for ModelElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {:?})", RatVec(&self.base), self.exponent)
    }
}

/// Automorphism `θ` of the model with `θ(w, 0) = (φw, 0)` and
/// `θ(0, e_i) = (c_i, e_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelAut {
    pub base_map: RatMatrix,
    #[serde(serialize_with = "ser_cocycle")]
    pub cocycle: Vec<AlgebraElement>,
}

fn ser_cocycle<S: serde::Serializer>(c: &[AlgebraElement], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for v in c {
        let texts: Vec<String> = v.iter().map(crate::exactlin::fmt_rat).collect();
        seq.serialize_element(&texts)?;
    }
    seq.end()
}

impl ModelAut {
    /// `(φ, 0)`.
    pub fn linear(base_map: RatMatrix, k: usize) -> Self {
        let n = base_map.rows();
        ModelAut {
            base_map,
            cocycle: vec![vec![Rat::zero(); n]; k],
        }
    }

    pub fn has_trivial_cocycle(&self) -> bool {
        self.cocycle.iter().all(|c| c.iter().all(|x| x.is_zero()))
    }
}

#[derive(Clone, Debug)]
pub struct GroupModel {
    base: Base,
    algebra: NilLieAlgebra,
    actions: Vec<RatMatrix>,
    inverses: Vec<RatMatrix>,
    jordan: Vec<MultiplicativeJordan>,
    certificates: Vec<SpectrumCertificate>,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.actions == other.actions
    }
}

impl GroupModel {
    /// Validates shapes, invertibility, pairwise commutation, lattice
    /// preservation and (for nilpotent bases) the automorphism property.
    pub fn new(base: Base, actions: Vec<RatMatrix>) -> Result<Self, SplittingError> {
        let n = base.dim();
        let algebra = match &base {
            Base::Real(n) | Base::Lattice(n) => NilLieAlgebra::abelian(*n),
            Base::Nil { algebra, .. } => algebra.clone(),
        };
        let mut inverses = Vec::with_capacity(actions.len());
        let mut jordan = Vec::with_capacity(actions.len());
        let mut certificates = Vec::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if !a.is_square() || a.rows() != n {
                return Err(SplittingError::Shape(format!(
                    "action {i} is {}x{}, base has dimension {n}",
                    a.rows(),
                    a.cols()
                )));
            }
            let inv = a.inverse().map_err(|_| SplittingError::NotInvertible(i))?;
            if base.is_discrete() && !(a.is_integral() && inv.is_integral()) {
                return Err(SplittingError::NotLatticePreserving(i));
            }
            if let Base::Nil { algebra, .. } = &base {
                if !algebra.is_automorphism(a)? {
                    return Err(SplittingError::NotAnAutomorphism(format!(
                        "action {i} does not preserve the bracket"
                    )));
                }
            }
            inverses.push(inv);
            jordan.push(jordan_chevalley_multiplicative(a)?);
            certificates.push(spectrum_certificate(a)?);
        }
        for i in 0..actions.len() {
            for j in i + 1..actions.len() {
                if !actions[i].commutes_with(&actions[j]) {
                    return Err(SplittingError::NonCommuting { i, j });
                }
            }
        }
        Ok(GroupModel {
            base,
            algebra,
            actions,
            inverses,
            jordan,
            certificates,
        })
    }

    pub fn real(dim: usize, actions: Vec<RatMatrix>) -> Result<Self, SplittingError> {
        GroupModel::new(Base::Real(dim), actions)
    }

    pub fn lattice(dim: usize, actions: Vec<RatMatrix>) -> Result<Self, SplittingError> {
        GroupModel::new(Base::Lattice(dim), actions)
    }

    pub fn nil(algebra: NilLieAlgebra, lattice: bool, actions: Vec<RatMatrix>) -> Result<Self, SplittingError> {
        GroupModel::new(Base::Nil { algebra, lattice }, actions)
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn algebra(&self) -> &NilLieAlgebra {
        &self.algebra
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// `k`, the rank of the exponent group.
    pub fn rank(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[RatMatrix] {
        &self.actions
    }

    pub fn certificates(&self) -> &[SpectrumCertificate] {
        &self.certificates
    }

    pub fn semisimple_parts(&self) -> Vec<RatMatrix> {
        self.jordan.iter().map(|j| j.semisimple.clone()).collect()
    }

    pub fn unipotent_parts(&self) -> Vec<RatMatrix> {
        self.jordan.iter().map(|j| j.unipotent.clone()).collect()
    }

    pub fn jordan(&self) -> &[MultiplicativeJordan] {
        &self.jordan
    }

    pub fn is_abelian_base(&self) -> bool {
        self.algebra.is_abelian()
    }

    /// Every action has its spectrum certified on the unit circle.
    pub fn polynomial_growth(&self) -> Result<(), SplittingError> {
        for (i, c) in self.certificates.iter().enumerate() {
            if !c.is_modulus_one() {
                let detail = match c {
                    SpectrumCertificate::NotModulusOne { witness } => witness.clone(),
                    SpectrumCertificate::Inconclusive { reason } => reason.clone(),
                    _ => String::new(),
                };
                return Err(SplittingError::NotPolynomialGrowth(format!("action {i}: {detail}")));
            }
        }
        Ok(())
    }

    pub fn has_polynomial_growth(&self) -> bool {
        self.polynomial_growth().is_ok()
    }

    fn power_of(&self, mats: &[RatMatrix], invs: Option<&[RatMatrix]>, m: &[i64]) -> RatMatrix {
        let n = self.base_dim();
        let mut out = RatMatrix::identity(n);
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = if e > 0 {
                mats[i].clone()
            } else {
                match invs {
                    Some(inv) => inv[i].clone(),
                    None => mats[i].inverse().expect("invertible"),
                }
            };
            out = &out * &base.pow_u(e.unsigned_abs());
        }
        out
    }

    /// `A^m = Π A_i^{m_i}`.
    pub fn action_power(&self, m: &[i64]) -> RatMatrix {
        self.power_of(&self.actions, Some(&self.inverses), m)
    }

    /// `Π (A_i)_s^{m_i}`, which is also `(A^m)_s`.
    pub fn semisimple_power(&self, m: &[i64]) -> RatMatrix {
        self.power_of(&self.semisimple_parts(), None, m)
    }

    pub fn unipotent_power(&self, m: &[i64]) -> RatMatrix {
        self.power_of(&self.unipotent_parts(), None, m)
    }

    pub fn identity(&self) -> ModelElement {
        ModelElement {
            base: vec![Rat::zero(); self.base_dim()],
            exponent: vec![0; self.rank()],
        }
    }

    pub fn element(&self, base: AlgebraElement, exponent: Vec<i64>) -> ModelElement {
        assert_eq!(base.len(), self.base_dim());
        assert_eq!(exponent.len(), self.rank());
        ModelElement { base, exponent }
    }

    pub fn generator(&self, i: usize) -> ModelElement {
        let mut e = vec![0; self.rank()];
        e[i] = 1;
        ModelElement {
            base: vec![Rat::zero(); self.base_dim()],
            exponent: e,
        }
    }

    pub fn base_element(&self, v: AlgebraElement) -> ModelElement {
        ModelElement {
            base: v,
            exponent: vec![0; self.rank()],
        }
    }

    /// `(v, m)(w, l) = (v ∗ A^m w, m + l)`.
    pub fn mul(&self, x: &ModelElement, y: &ModelElement) -> ModelElement {
        let moved = self.action_power(&x.exponent).apply(&y.base);
        ModelElement {
            base: self.algebra.mul(&x.base, &moved),
            exponent: x.exponent.iter().zip(&y.exponent).map(|(a, b)| a + b).collect(),
        }
    }

    /// `(v, m)⁻¹ = (−A^{−m} v, −m)`.
    pub fn inv(&self, x: &ModelElement) -> ModelElement {
        let neg: Vec<i64> = x.exponent.iter().map(|e| -e).collect();
        let moved = self.action_power(&neg).apply(&x.base);
        ModelElement {
            base: moved.iter().map(|v| -v.clone()).collect(),
            exponent: neg,
        }
    }

    pub fn pow(&self, x: &ModelElement, n: i64) -> ModelElement {
        let step = if n >= 0 { x.clone() } else { self.inv(x) };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(&acc, &step);
        }
        acc
    }

    /// `g x g⁻¹`
    pub fn conj(&self, g: &ModelElement, x: &ModelElement) -> ModelElement {
        self.mul(&self.mul(g, x), &self.inv(g))
    }

    /// `x y x⁻¹ y⁻¹`
    pub fn commutator(&self, x: &ModelElement, y: &ModelElement) -> ModelElement {
        self.mul(&self.mul(x, y), &self.mul(&self.inv(x), &self.inv(y)))
    }

    /// Matrix of `ι_x` on the base algebra: `Ad(v) · A^m`.
    pub fn inner_base_matrix(&self, x: &ModelElement) -> RatMatrix {
        let a = self.action_power(&x.exponent);
        if self.is_abelian_base() {
            a
        } else {
            &self.algebra.adjoint(&x.base) * &a
        }
    }

    /// Base part of `Π_i (c_i, e_i)^{l_i}`, the cocycle evaluated at `l`.
    pub fn cocycle_at(&self, theta: &ModelAut, l: &[i64]) -> AlgebraElement {
        let mut acc = self.identity();
        for (i, &e) in l.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let mut gexp = vec![0; self.rank()];
            gexp[i] = 1;
            let g = ModelElement {
                base: theta.cocycle[i].clone(),
                exponent: gexp,
            };
            acc = self.mul(&acc, &self.pow(&g, e));
        }
        acc.base
    }

    /// `θ(w, l) = (φw ∗ c(l), l)`.
    pub fn aut_apply(&self, theta: &ModelAut, x: &ModelElement) -> ModelElement {
        let moved = theta.base_map.apply(&x.base);
        ModelElement {
            base: self.algebra.mul(&moved, &self.cocycle_at(theta, &x.exponent)),
            exponent: x.exponent.clone(),
        }
    }

    /// `θ₁ ∘ θ₂`
    pub fn aut_compose(&self, t1: &ModelAut, t2: &ModelAut) -> ModelAut {
        let cocycle = (0..self.rank())
            .map(|i| {
                let img = self.aut_apply(
                    t1,
                    &ModelElement {
                        base: t2.cocycle[i].clone(),
                        exponent: self.generator(i).exponent,
                    },
                );
                img.base
            })
            .collect();
        ModelAut {
            base_map: &t1.base_map * &t2.base_map,
            cocycle,
        }
    }

    pub fn aut_inverse(&self, t: &ModelAut) -> Result<ModelAut, SplittingError> {
        let inv = t.base_map.inverse()?;
        let cocycle = t
            .cocycle
            .iter()
            .map(|c| inv.apply(c).into_iter().map(|v| -v).collect())
            .collect();
        Ok(ModelAut { base_map: inv, cocycle })
    }

    /// `ι_g`; for `g = (v, m)` the cocycle is `c_i = v ∗ (−A_i v)`.
    pub fn inner_aut(&self, g: &ModelElement) -> ModelAut {
        let cocycle = (0..self.rank())
            .map(|i| {
                let moved: Vec<Rat> = self.actions[i].apply(&g.base).into_iter().map(|x| -x).collect();
                self.algebra.mul(&g.base, &moved)
            })
            .collect();
        ModelAut {
            base_map: self.inner_base_matrix(g),
            cocycle,
        }
    }

    /// Checks that `θ` respects the defining relations of the model:
    /// `φ` is an algebra automorphism, `φ A_i = Ad(c_i) A_i φ`, and the
    /// images of the exponent generators commute.
    pub fn is_model_automorphism(&self, t: &ModelAut) -> bool {
        if t.base_map.rows() != self.base_dim() || t.cocycle.len() != self.rank() {
            return false;
        }
        if !self.algebra.is_automorphism(&t.base_map).unwrap_or(false) {
            return false;
        }
        for i in 0..self.rank() {
            let ad = if self.is_abelian_base() {
                RatMatrix::identity(self.base_dim())
            } else {
                self.algebra.adjoint(&t.cocycle[i])
            };
            if &t.base_map * &self.actions[i] != &(&ad * &self.actions[i]) * &t.base_map {
                return false;
            }
        }
        let imgs: Vec<ModelElement> = (0..self.rank())
            .map(|i| ModelElement {
                base: t.cocycle[i].clone(),
                exponent: self.generator(i).exponent,
            })
            .collect();
        for i in 0..imgs.len() {
            for j in i + 1..imgs.len() {
                if self.mul(&imgs[i], &imgs[j]) != self.mul(&imgs[j], &imgs[i]) {
                    return false;
                }
            }
        }
        if self.base.is_discrete() {
            let inv = match t.base_map.inverse() {
                Ok(m) => m,
                Err(_) => return false,
            };
            if !t.base_map.is_integral() || !inv.is_integral() {
                return false;
            }
        }
        true
    }

    /// Random element: integer coordinates on discrete bases, small
    /// rationals otherwise.
    pub fn random_element<R: Rng>(&self, rng: &mut R, max_entry: i64, max_exp: i64) -> ModelElement {
        let base = (0..self.base_dim())
            .map(|_| {
                let p = rng.gen_range(-max_entry..=max_entry);
                if self.base.is_discrete() {
                    int(p)
                } else {
                    rat(p, rng.gen_range(1..=3))
                }
            })
            .collect();
        let exponent = (0..self.rank()).map(|_| rng.gen_range(-max_exp..=max_exp)).collect();
        ModelElement { base, exponent }
    }

    /// Same model presented in the basis given by the columns of `p`:
    /// actions become `p⁻¹ A p`, and for nilpotent bases the structure
    /// constants change accordingly. On discrete bases `p` must be
    /// unimodular.
    pub fn conjugated(&self, p: &RatMatrix) -> Result<GroupModel, SplittingError> {
        let inv = p.inverse()?;
        if self.base.is_discrete() && !(p.is_integral() && inv.is_integral()) {
            return Err(SplittingError::NotLatticePreserving(usize::MAX));
        }
        let actions = self.actions.iter().map(|a| &(&inv * a) * p).collect();
        let base = match &self.base {
            Base::Nil { algebra, lattice } => Base::Nil {
                algebra: NilLieAlgebra::new(algebra.algebra().change_basis(p)?)?,
                lattice: *lattice,
            },
            other => other.clone(),
        };
        GroupModel::new(base, actions)
    }

    /// The exponent generators permuted by `perm` (new generator `i` is old
    /// generator `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<GroupModel, SplittingError> {
        let actions = perm.iter().map(|&i| self.actions[i].clone()).collect();
        GroupModel::new(self.base.clone(), actions)
    }

    /// `"R^2 x| Z via [[0,-1],[1,6/5]]"`.
    pub fn label(&self) -> String {
        let k = self.rank();
        if k == 0 {
            return self.base.label();
        }
        let acts: Vec<String> = self.actions.iter().map(|a| a.to_string()).collect();
        let z = if k == 1 { "Z".to_string() } else { format!("Z^{k}") };
        format!("{} x| {z} via {}", self.base.label(), acts.join(", "))
    }

    pub fn to_spec(&self) -> ModelSpec {
        let (kind, structure, lattice) = match &self.base {
            Base::Real(_) => ("real", Vec::new(), None),
            Base::Lattice(_) => ("lattice", Vec::new(), None),
            Base::Nil { algebra, lattice } => ("nil", algebra.algebra().entries(), Some(*lattice)),
        };
        ModelSpec {
            base: BaseSpec {
                kind: kind.to_string(),
                dim: self.base_dim(),
                structure,
                lattice,
            },
            actions: self.actions.clone(),
            exponent_rank: self.rank(),
        }
    }
}

/// Integer row vector as `i64`s.
pub fn int_row(m: &IntMatrix, i: usize) -> Vec<i64> {
    m.row(i).iter().map(|v| v.to_i64().expect("small exponent")).collect()
}

/// Largest absolute value in an exponent vector.
pub fn exp_norm(m: &[i64]) -> i64 {
    m.iter().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn bigint_abs_le(x: &num_bigint::BigInt, bound: i64) -> bool {
    x.abs() <= num_bigint::BigInt::from(bound)
}

/// JSON form: `{"base": {"kind", "dim", "structure"}, "actions", "exponent_rank"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub base: BaseSpec,
    pub actions: Vec<RatMatrix>,
    pub exponent_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structure: Vec<StructureEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<bool>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<GroupModel, SplittingError> {
        if self.actions.len() != self.exponent_rank {
            return Err(SplittingError::Shape(format!(
                "exponent_rank is {} but {} actions were given",
                self.exponent_rank,
                self.actions.len()
            )));
        }
        let base = match self.base.kind.as_str() {
            "real" | "lattice" if !self.base.structure.is_empty() => {
                return Err(SplittingError::Shape(
                    "structure constants are only allowed for kind \"nil\"".into(),
                ))
            }
            "real" => Base::Real(self.base.dim),
            "lattice" => Base::Lattice(self.base.dim),
            "nil" => {
                let alg = LieAlgebra::from_entries(self.base.dim, &self.base.structure)?;
                Base::Nil {
                    algebra: NilLieAlgebra::new(alg)?,
                    lattice: self.base.lattice.unwrap_or(false),
                }
            }
            other => {
                return Err(SplittingError::Shape(format!(
                    "unknown base kind {other:?} (expected real, lattice or nil)"
                )))
            }
        };
        GroupModel::new(base, self.actions.clone())
    }
}

impl Serialize for GroupModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<GroupModel, D::Error> {
        ModelSpec::deserialize(d)?.build().map_err(serde::de::Error::custom)
    }
}
