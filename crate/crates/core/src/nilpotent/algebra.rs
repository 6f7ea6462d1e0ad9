//! Lie algebras over ℚ given by structure constants.

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactlin::rat::{fmt_rat, parse_rat};
use crate::exactlin::{Rat, RatMatrix};

use super::LieError;

/// Coordinates of an element in the algebra basis (exponential coordinates
/// of the first kind when the algebra is nilpotent).
pub type AlgebraElement = Vec<Rat>;

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, stored densely.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<Rat>,
}

/// One nonzero structure constant, the sparse serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(with = "crate::exactlin::rat::serde_rat")]
    pub value: Rat,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            c: vec![Rat::zero(); dim * dim * dim],
        }
    }

    /// Builds from sparse entries `[e_i, e_j] ∋ value · e_k`; the entry for
    /// `(j, i)` is filled in by antisymmetry. Entries are not validated
    /// beyond index bounds and consistency of the two orientations.
    pub fn from_entries(dim: usize, entries: &[StructureEntry]) -> Result<Self, LieError> {
        let mut alg = LieAlgebra::abelian(dim);
        for e in entries {
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return Err(LieError::IndexOutOfRange {
                    i: e.i,
                    j: e.j,
                    k: e.k,
                    dim,
                });
            }
            if e.i == e.j {
                if !e.value.is_zero() {
                    return Err(LieError::NotAntisymmetric { i: e.i, j: e.j, k: e.k });
                }
                continue;
            }
            let existing = alg.get(e.i, e.j, e.k).clone();
            if !existing.is_zero() && existing != e.value {
                return Err(LieError::NotAntisymmetric { i: e.i, j: e.j, k: e.k });
            }
            alg.set(e.i, e.j, e.k, e.value.clone());
            alg.set(e.j, e.i, e.k, -e.value.clone());
        }
        Ok(alg)
    }

    /// Convenience constructor from `(i, j, k, p, q)` meaning
    /// `[e_i, e_j] ∋ (p/q) e_k`.
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, i64, i64)]) -> Self {
        let entries: Vec<StructureEntry> = triples
            .iter()
            .map(|&(i, j, k, p, q)| StructureEntry {
                i,
                j,
                k,
                value: crate::exactlin::rat(p, q),
            })
            .collect();
        LieAlgebra::from_entries(dim, &entries).expect("well-formed structure constants")
    }

    /// Raw constructor from a dense table `c[i][j][k]`; nothing is checked.
    pub fn from_dense(dim: usize, c: Vec<Rat>) -> Self {
        assert_eq!(c.len(), dim * dim * dim);
        LieAlgebra { dim, c }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: Rat) {
        let d = self.dim;
        self.c[(i * d + j) * d + k] = v;
    }

    /// Sparse entries with `i < j`, in lexicographic order.
    pub fn entries(&self) -> Vec<StructureEntry> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push(StructureEntry {
                            i,
                            j,
                            k,
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraElement {
        let mut v = vec![Rat::zero(); self.dim];
        v[i] = Rat::one();
        v
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraElement {
        let d = self.dim;
        self.c[(i * d + j) * d..(i * d + j + 1) * d].to_vec()
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> AlgebraElement {
        let d = self.dim;
        let mut out = vec![Rat::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let xy = &x[i] * &y[j];
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.c[base + k];
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad x`: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[Rat]) -> RatMatrix {
        let d = self.dim;
        let mut m = RatMatrix::zeros(d, d);
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    let c = self.get(i, j, k);
                    if !c.is_zero() {
                        m[(k, j)] += &x[i] * c;
                    }
                }
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> RatMatrix {
        self.ad(&self.basis_vector(i))
    }

    pub fn check_antisymmetry(&self) -> Result<(), LieError> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    if *self.get(i, j, k) != -self.get(j, i, k).clone() {
                        return Err(LieError::NotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_jacobi(&self) -> Result<(), LieError> {
        let d = self.dim;
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (ei, ej, ek) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    let a = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let b = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let c = self.bracket(&ek, &self.bracket(&ei, &ej));
                    if (0..d).any(|t| !(&a[t] + &b[t] + &c[t]).is_zero()) {
                        return Err(LieError::JacobiViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Column basis of `[U, V]` for column bases `U`, `V`.
    pub fn bracket_span(&self, u: &RatMatrix, v: &RatMatrix) -> RatMatrix {
        let mut cols = Vec::new();
        for a in u.columns() {
            for b in v.columns() {
                let w = self.bracket(&a, &b);
                if w.iter().any(|x| !x.is_zero()) {
                    cols.push(w);
                }
            }
        }
        if cols.is_empty() {
            RatMatrix::zeros(self.dim, 0)
        } else {
            RatMatrix::from_columns(&cols).image()
        }
    }

    /// Lower central series `γ₁ = 𝔤, γ_{j+1} = [𝔤, γ_j]` until it
    /// stabilizes; the last entry is either zero or equal to its predecessor.
    pub fn lower_central_series(&self) -> Vec<RatMatrix> {
        let full = RatMatrix::identity(self.dim);
        let mut layers = vec![full.clone()];
        loop {
            let last = layers.last().unwrap();
            if last.cols() == 0 {
                break;
            }
            let next = self.bracket_span(&full, last);
            let stable = next.cols() == last.cols();
            layers.push(next);
            if stable {
                break;
            }
        }
        layers
    }

    /// Derived series `𝔤⁽⁰⁾ = 𝔤, 𝔤⁽ʲ⁺¹⁾ = [𝔤⁽ʲ⁾, 𝔤⁽ʲ⁾]` until it stabilizes.
    pub fn derived_series(&self) -> Vec<RatMatrix> {
        let mut layers = vec![RatMatrix::identity(self.dim)];
        loop {
            let last = layers.last().unwrap();
            if last.cols() == 0 {
                break;
            }
            let next = self.bracket_span(last, last);
            let stable = next.cols() == last.cols();
            layers.push(next);
            if stable {
                break;
            }
        }
        layers
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().map_or(true, |l| l.cols() == 0)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().map_or(true, |l| l.cols() == 0)
    }

    /// Structure constants in the basis given by the columns of `p`
    /// (which must be invertible).
    pub fn change_basis(&self, p: &RatMatrix) -> Result<LieAlgebra, LieError> {
        if !p.is_square() || p.rows() != self.dim {
            return Err(LieError::ShapeMismatch(format!(
                "basis change must be {0}x{0}",
                self.dim
            )));
        }
        let inv = p.inverse()?;
        let d = self.dim;
        let cols = p.columns();
        let mut c = vec![Rat::zero(); d * d * d];
        for a in 0..d {
            for b in 0..d {
                if a == b {
                    continue;
                }
                let w = inv.apply(&self.bracket(&cols[a], &cols[b]));
                for (k, v) in w.into_iter().enumerate() {
                    c[(a * d + b) * d + k] = v;
                }
            }
        }
        Ok(LieAlgebra { dim: d, c })
    }

    /// `M` is invertible and `M[x, y] = [Mx, My]` on basis pairs.
    pub fn is_automorphism(&self, m: &RatMatrix) -> Result<bool, LieError> {
        if !m.is_square() || m.rows() != self.dim {
            return Err(LieError::ShapeMismatch(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_invertible() {
            return Ok(false);
        }
        let cols = m.columns();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let lhs = m.apply(&self.bracket_basis(i, j));
                let rhs = self.bracket(&cols[i], &cols[j]);
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `D[x, y] = [Dx, y] + [x, Dy]` on basis pairs.
    pub fn is_derivation(&self, m: &RatMatrix) -> bool {
        if !m.is_square() || m.rows() != self.dim {
            return false;
        }
        let cols = m.columns();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let lhs = m.apply(&self.bracket_basis(i, j));
                let a = self.bracket(&cols[i], &self.basis_vector(j));
                let b = self.bracket(&self.basis_vector(i), &cols[j]);
                if (0..self.dim).any(|t| lhs[t] != &a[t] + &b[t]) {
                    return false;
                }
            }
        }
        true
    }

    /// `self ⋊ ℚ^k` where the `i`-th new direction `f_i` acts by the
    /// derivation `derivations[i]`, and the `f_i` commute with each other.
    /// The new basis is `e_0, …, e_{n−1}, f_0, …, f_{k−1}`.
    pub fn extend_by_derivations(&self, derivations: &[RatMatrix]) -> Result<LieAlgebra, LieError> {
        let n = self.dim;
        let k = derivations.len();
        for (idx, d) in derivations.iter().enumerate() {
            if !self.is_derivation(d) {
                return Err(LieError::NotADerivation(idx));
            }
        }
        let total = n + k;
        let mut out = LieAlgebra::abelian(total);
        for i in 0..n {
            for j in 0..n {
                for t in 0..n {
                    out.set(i, j, t, self.get(i, j, t).clone());
                }
            }
        }
        for (a, d) in derivations.iter().enumerate() {
            for j in 0..n {
                for t in 0..n {
                    let v = d[(t, j)].clone();
                    out.set(n + a, j, t, v.clone());
                    out.set(j, n + a, t, -v);
                }
            }
        }
        Ok(out)
    }

    /// Direct sum with an abelian algebra of dimension `extra`.
    pub fn direct_sum_abelian(&self, extra: usize) -> LieAlgebra {
        self.extend_by_derivations(&vec![RatMatrix::zeros(self.dim, self.dim); extra])
            .expect("zero maps are derivations")
    }
}

/// `{"dim": n, "structure": [{i, j, k, value}]}`.
#[derive(Serialize, Deserialize)]
struct LieAlgebraRepr {
    dim: usize,
    #[serde(default)]
    structure: Vec<StructureEntry>,
}

impl Serialize for LieAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LieAlgebraRepr {
            dim: self.dim,
            structure: self.entries(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieAlgebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<LieAlgebra, D::Error> {
        let r = LieAlgebraRepr::deserialize(d)?;
        LieAlgebra::from_entries(r.dim, &r.structure).map_err(serde::de::Error::custom)
    }
}

/// Human-readable bracket table, e.g. `[e1,e2]=e3`.
pub fn describe_brackets(alg: &LieAlgebra) -> String {
    let mut parts = Vec::new();
    for i in 0..alg.dim() {
        for j in i + 1..alg.dim() {
            let w = alg.bracket_basis(i, j);
            let terms: Vec<String> = w
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| {
                    if v.is_one() {
                        format!("e{}", k + 1)
                    } else {
                        format!("{}e{}", fmt_rat(v), k + 1)
                    }
                })
                .collect();
            if !terms.is_empty() {
                parts.push(format!("[e{},e{}]={}", i + 1, j + 1, terms.join("+")));
            }
        }
    }
    if parts.is_empty() {
        "abelian".into()
    } else {
        parts.join(", ")
    }
}

/// Parses a coordinate vector of `"p/q"` strings.
pub fn parse_element(texts: &[String]) -> Result<AlgebraElement, LieError> {
    texts
        .iter()
        .map(|t| parse_rat(t).map_err(|e| LieError::ShapeMismatch(e.to_string())))
        .collect()
}
