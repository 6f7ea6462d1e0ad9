//! Nilpotent Lie algebras over ℚ, the Baker–Campbell–Hausdorff group law,
//! Malcev completions of unipotent matrix groups and faithful unipotent
//! representations.

pub mod algebra;
pub mod bch;
pub mod malcev;
pub mod rep;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactlin::{LinAlgError, Rat, RatMatrix};

pub use algebra::{describe_brackets, AlgebraElement, LieAlgebra, StructureEntry};
pub use bch::{bch_product, bch_with_class};
pub use malcev::{malcev_completion, MalcevCompletion};
pub use rep::{faithful_unipotent_rep, group_image, rep_of_element};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("structure constant index ({i},{j},{k}) out of range for dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("structure constants are not antisymmetric at ({i},{j},{k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on basis triple ({i},{j},{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("lower central series stabilizes at dimension {stable_dim} > 0")]
    NotNilpotent { stable_dim: usize },
    #[error("derived series stabilizes at dimension {stable_dim} > 0")]
    NotSolvable { stable_dim: usize },
    #[error("generator {0} is not unipotent")]
    NotUnipotentGenerator(usize),
    #[error("generated group is not nilpotent: {0}")]
    NotNilpotentGroup(String),
    #[error("matrix {0} is not a derivation")]
    NotADerivation(usize),
    #[error("ad-eigenvalues are not all purely imaginary: {0}")]
    NotPolynomialGrowth(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Lower central series `γ₁ ⊋ γ₂ ⊋ … ⊋ γ_{c+1} = 0` with exact bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralSeries {
    pub layers: Vec<RatMatrix>,
    pub layer_dims: Vec<usize>,
}

impl CentralSeries {
    /// Nilpotency class: number of nonzero layers.
    pub fn class(&self) -> usize {
        self.layer_dims.iter().filter(|&&d| d > 0).count()
    }

    /// Dimensions of the successive quotients `γ_j / γ_{j+1}`.
    pub fn quotient_dims(&self) -> Vec<usize> {
        self.layer_dims.windows(2).map(|w| w[0] - w[1]).collect()
    }
}

/// Checks antisymmetry, the Jacobi identity and nilpotency, returning the
/// lower central series.
pub fn validate(alg: &LieAlgebra) -> Result<CentralSeries, LieError> {
    alg.check_antisymmetry()?;
    alg.check_jacobi()?;
    let layers = alg.lower_central_series();
    let last = layers.last().map_or(0, |l| l.cols());
    if last > 0 {
        return Err(LieError::NotNilpotent { stable_dim: last });
    }
    let layer_dims = layers.iter().map(|l| l.cols()).collect();
    Ok(CentralSeries { layers, layer_dims })
}

/// `Σ_k k · dim(γ_k / γ_{k+1})`.
pub fn guivarch_degree(alg: &LieAlgebra) -> Result<usize, LieError> {
    let s = validate(alg)?;
    Ok(s.quotient_dims().iter().enumerate().map(|(k, d)| (k + 1) * d).sum())
}

/// A validated nilpotent Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilLieAlgebra {
    algebra: LieAlgebra,
    series: CentralSeries,
}

impl NilLieAlgebra {
    pub fn new(algebra: LieAlgebra) -> Result<Self, LieError> {
        let series = validate(&algebra)?;
        Ok(NilLieAlgebra { algebra, series })
    }

    pub fn abelian(dim: usize) -> Self {
        NilLieAlgebra::new(LieAlgebra::abelian(dim)).expect("abelian algebras are nilpotent")
    }

    pub fn heisenberg() -> Self {
        NilLieAlgebra::new(LieAlgebra::from_triples(3, &[(0, 1, 2, 1, 1)])).unwrap()
    }

    /// `[e1,e2] = e3`, `[e1,e3] = e4`.
    pub fn filiform4() -> Self {
        NilLieAlgebra::new(LieAlgebra::from_triples(4, &[(0, 1, 2, 1, 1), (0, 2, 3, 1, 1)])).unwrap()
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn series(&self) -> &CentralSeries {
        &self.series
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn class(&self) -> usize {
        self.series.class()
    }

    pub fn is_abelian(&self) -> bool {
        self.algebra.is_abelian()
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> AlgebraElement {
        self.algebra.bracket(x, y)
    }

    /// Group law in exponential coordinates.
    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> AlgebraElement {
        bch_product(self, x, y)
    }

    pub fn inv(&self, x: &[Rat]) -> AlgebraElement {
        x.iter().map(|v| -v.clone()).collect()
    }

    pub fn zero(&self) -> AlgebraElement {
        vec![Rat::from_integer(0.into()); self.dim()]
    }

    /// `x^n` in the group, which is `n·x` in exponential coordinates.
    pub fn pow(&self, x: &[Rat], n: i64) -> AlgebraElement {
        let c = Rat::from_integer(n.into());
        x.iter().map(|v| v * &c).collect()
    }

    /// Matrix of `Ad(exp x) = exp(ad x)` on the algebra.
    pub fn adjoint(&self, x: &[Rat]) -> RatMatrix {
        crate::exactlin::nilpotent_exp(&self.algebra.ad(x)).expect("ad of a nilpotent algebra is nilpotent")
    }

    pub fn guivarch_degree(&self) -> usize {
        self.series
            .quotient_dims()
            .iter()
            .enumerate()
            .map(|(k, d)| (k + 1) * d)
            .sum()
    }

    /// Basis adapted to the lower central series (layer 1 first) and the
    /// layer index of each basis vector. Column `j` of the matrix is the
    /// `j`-th adapted basis vector in the original coordinates.
    pub fn adapted_basis(&self) -> (RatMatrix, Vec<usize>) {
        let n = self.dim();
        let layers = &self.series.layers;
        let mut chosen: Vec<Vec<Rat>> = Vec::new();
        let mut weights = Vec::new();
        // deepest layer first so each complement is taken modulo the next layer
        let mut acc = RatMatrix::zeros(n, 0);
        let mut blocks: Vec<(usize, Vec<Vec<Rat>>)> = Vec::new();
        for w in (1..layers.len()).rev() {
            let layer = &layers[w - 1];
            let mut block = Vec::new();
            for col in layer.columns() {
                if !acc.spans(&col) {
                    acc = acc.hstack(&RatMatrix::from_columns(&[col.clone()]));
                    block.push(col);
                }
            }
            blocks.push((w, block));
        }
        blocks.reverse();
        for (w, block) in blocks {
            for col in block {
                chosen.push(col);
                weights.push(w);
            }
        }
        let p = if chosen.is_empty() {
            RatMatrix::zeros(n, 0)
        } else {
            RatMatrix::from_columns(&chosen)
        };
        (p, weights)
    }

    pub fn is_automorphism(&self, m: &RatMatrix) -> Result<bool, LieError> {
        self.algebra.is_automorphism(m)
    }
}

/// `true` iff `M` is an invertible bracket-preserving map.
pub fn is_algebra_automorphism(alg: &NilLieAlgebra, m: &RatMatrix) -> Result<bool, LieError> {
    alg.is_automorphism(m)
}

impl Serialize for NilLieAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.algebra.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NilLieAlgebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<NilLieAlgebra, D::Error> {
        let alg = LieAlgebra::deserialize(d)?;
        NilLieAlgebra::new(alg).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let ab = validate(&LieAlgebra::abelian(2)).unwrap();
        assert_eq!(ab.layer_dims, vec![2, 0]);
        let h = validate(NilLieAlgebra::heisenberg().algebra()).unwrap();
        assert_eq!(h.layer_dims, vec![3, 1, 0]);
        let sl2 = LieAlgebra::from_triples(3, &[(0, 1, 1, 2, 1), (0, 2, 2, -2, 1), (1, 2, 0, 1, 1)]);
        assert_eq!(validate(&sl2), Err(LieError::NotNilpotent { stable_dim: 3 }));
        // [e1,e2]=e3, [e2,e3]=e2, [e1,e3]=e1: the cyclic sum is 2e3
        let bad = LieAlgebra::from_triples(3, &[(0, 1, 2, 1, 1), (1, 2, 1, 1, 1), (0, 2, 0, 1, 1)]);
        assert!(matches!(validate(&bad), Err(LieError::JacobiViolation { .. })));
    }

    #[test]
    fn guivarch_examples() {
        assert_eq!(guivarch_degree(&LieAlgebra::abelian(5)).unwrap(), 5);
        assert_eq!(guivarch_degree(NilLieAlgebra::heisenberg().algebra()).unwrap(), 4);
        assert_eq!(guivarch_degree(NilLieAlgebra::filiform4().algebra()).unwrap(), 7);
    }

    #[test]
    fn adapted_basis_weights() {
        let f = NilLieAlgebra::filiform4();
        let (p, w) = f.adapted_basis();
        assert_eq!(w, vec![1, 1, 2, 3]);
        assert!(p.is_invertible());
    }
}
