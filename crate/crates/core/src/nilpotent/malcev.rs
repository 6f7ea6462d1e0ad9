//! Malcev completion of a group generated by unipotent rational matrices.

use num_traits::Zero;

use crate::exactlin::{nilpotent_exp, nilpotent_log, Rat, RatMatrix};

use super::algebra::{AlgebraElement, LieAlgebra};
use super::{LieError, NilLieAlgebra};

/// The rational Lie algebra spanned by the logs of the generators and
/// their iterated brackets, with its basis realized as matrices.
#[derive(Clone, Debug)]
pub struct MalcevCompletion {
    pub algebra: NilLieAlgebra,
    /// Matrix realizing each basis vector.
    pub basis: Vec<RatMatrix>,
    /// Coordinates of `log g` for each generator `g`.
    pub generator_coords: Vec<AlgebraElement>,
}

fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    &(a * b) - &(b * a)
}

fn flatten(m: &RatMatrix) -> Vec<Rat> {
    m.entries().to_vec()
}

impl MalcevCompletion {
    fn span_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(&self.basis.iter().map(flatten).collect::<Vec<_>>())
    }

    /// Coordinates of a nilpotent matrix lying in the algebra.
    pub fn coords_of_log(&self, b: &RatMatrix) -> Option<AlgebraElement> {
        if self.basis.is_empty() {
            return if b.is_zero() { Some(Vec::new()) } else { None };
        }
        self.span_matrix().solve(&flatten(b))
    }

    /// Coordinates of a unipotent matrix of the completed group.
    pub fn coords_of(&self, u: &RatMatrix) -> Result<Option<AlgebraElement>, LieError> {
        let b = nilpotent_log(u)?;
        Ok(self.coords_of_log(&b))
    }

    pub fn matrix_of(&self, x: &[Rat]) -> RatMatrix {
        let n = self.basis.first().map_or(0, |b| b.rows());
        let mut out = RatMatrix::zeros(n, n);
        for (c, b) in x.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = &out + &b.scale(c);
            }
        }
        nilpotent_exp(&out).expect("algebra elements are nilpotent")
    }

    /// Image of the word `g_{i₁}^{n₁} ⋯ g_{i_r}^{n_r}` in exponential
    /// coordinates, computed with the BCH product.
    pub fn embed_word(&self, word: &[(usize, i64)]) -> AlgebraElement {
        let mut acc = self.algebra.zero();
        for &(g, n) in word {
            let step = self.algebra.pow(&self.generator_coords[g], n);
            acc = self.algebra.mul(&acc, &step);
        }
        acc
    }

    /// The same word evaluated as a matrix product.
    pub fn word_matrix(&self, generators: &[RatMatrix], word: &[(usize, i64)]) -> RatMatrix {
        let n = generators.first().map_or(0, |g| g.rows());
        let mut acc = RatMatrix::identity(n);
        for &(g, e) in word {
            acc = &acc * &generators[g].pow(e).expect("unipotent matrices are invertible");
        }
        acc
    }
}

/// Builds the completion. The bracket closure is aborted once the span
/// would exceed `(matrix size)²` dimensions, and the resulting algebra must
/// be nilpotent.
pub fn malcev_completion(generators: &[RatMatrix]) -> Result<MalcevCompletion, LieError> {
    let size = generators.first().map_or(0, |g| g.rows());
    let mut logs = Vec::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != size {
            return Err(LieError::ShapeMismatch(format!("generator {i} has the wrong shape")));
        }
        if !g.is_unipotent() {
            return Err(LieError::NotUnipotentGenerator(i));
        }
        logs.push(nilpotent_log(g)?);
    }

    let bound = size * size;
    let mut basis: Vec<RatMatrix> = Vec::new();
    let in_span = |basis: &[RatMatrix], m: &RatMatrix| -> bool {
        if m.is_zero() {
            return true;
        }
        if basis.is_empty() {
            return false;
        }
        RatMatrix::from_columns(&basis.iter().map(flatten).collect::<Vec<_>>()).spans(&flatten(m))
    };
    for l in &logs {
        if !in_span(&basis, l) {
            basis.push(l.clone());
        }
    }
    // close under brackets
    let mut frontier = 0;
    while frontier < basis.len() {
        let upto = basis.len();
        for i in 0..upto {
            for j in frontier.max(i + 1)..upto {
                let c = commutator(&basis[i], &basis[j]);
                if !in_span(&basis, &c) {
                    basis.push(c);
                    if basis.len() > bound {
                        return Err(LieError::NotNilpotentGroup(format!(
                            "bracket closure exceeds dimension bound {bound}"
                        )));
                    }
                }
            }
        }
        frontier = upto;
        if basis.len() == upto {
            break;
        }
    }

    let d = basis.len();
    let span = if d == 0 {
        RatMatrix::zeros(bound, 0)
    } else {
        RatMatrix::from_columns(&basis.iter().map(flatten).collect::<Vec<_>>())
    };
    let mut c = vec![Rat::zero(); d * d * d];
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let w = span
                .solve(&flatten(&commutator(&basis[a], &basis[b])))
                .expect("basis is closed under brackets");
            for (k, v) in w.into_iter().enumerate() {
                c[(a * d + b) * d + k] = v;
            }
        }
    }
    let algebra = match NilLieAlgebra::new(LieAlgebra::from_dense(d, c)) {
        Ok(a) => a,
        Err(LieError::NotNilpotent { stable_dim }) => {
            return Err(LieError::NotNilpotentGroup(format!(
                "lower central series of the log span stabilizes at dimension {stable_dim}"
            )))
        }
        Err(e) => return Err(e),
    };
    let generator_coords = logs
        .iter()
        .map(|l| {
            if d == 0 {
                Vec::new()
            } else {
                span.solve(&flatten(l)).expect("generator logs lie in the span")
            }
        })
        .collect();
    Ok(MalcevCompletion {
        algebra,
        basis,
        generator_coords,
    })
}
