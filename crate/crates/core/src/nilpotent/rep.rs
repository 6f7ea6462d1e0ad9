//! Faithful nilpotent matrix representation by left multiplication on a
//! truncated universal enveloping algebra.
//!
//! Work in a basis `f₁, …, f_n` adapted to the lower central series and
//! give `f_i` the weight of its layer. Since `[γ_a, γ_b] ⊆ γ_{a+b}`, the
//! span of PBW monomials of weighted degree `> c` (`c` the class) is a
//! two-sided ideal, so `g` acts on the quotient by left multiplication.
//! The action sends `1` to `x`, hence is injective, and each `f_i` raises
//! weighted degree, hence acts nilpotently.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::exactlin::{nilpotent_exp, Rat, RatMatrix};

use super::algebra::LieAlgebra;
use super::{LieError, NilLieAlgebra};

type Monomial = Vec<u8>;
type Element = BTreeMap<Monomial, Rat>;

struct Straightener<'a> {
    alg: &'a LieAlgebra,
    weights: &'a [usize],
    cap: usize,
    memo: HashMap<(usize, Monomial), Element>,
}

impl<'a> Straightener<'a> {
    fn weight(&self, m: &[u8]) -> usize {
        m.iter().zip(self.weights).map(|(&a, &w)| a as usize * w).sum()
    }

    /// Normal-ordered `f_i · f^a`, truncated above the weight cap.
    fn mul_gen(&mut self, i: usize, a: &Monomial) -> Element {
        if self.weight(a) + self.weights[i] > self.cap {
            return Element::new();
        }
        if let Some(e) = self.memo.get(&(i, a.clone())) {
            return e.clone();
        }
        let first = a.iter().position(|&x| x > 0);
        let result = match first {
            Some(j) if j < i => {
                // f_i f_j f^{a'} = f_j (f_i f^{a'}) + [f_i, f_j] f^{a'}
                let mut rest = a.clone();
                rest[j] -= 1;
                let mut out = Element::new();
                let inner = self.mul_gen(i, &rest);
                for (m, c) in inner {
                    for (m2, c2) in self.mul_gen(j, &m) {
                        *out.entry(m2).or_insert_with(Rat::zero) += &c * &c2;
                    }
                }
                let br = self.alg.bracket_basis(i, j);
                for (k, ck) in br.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    for (m2, c2) in self.mul_gen(k, &rest) {
                        *out.entry(m2).or_insert_with(Rat::zero) += ck * &c2;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
            _ => {
                let mut m = a.clone();
                m[i] += 1;
                let mut out = Element::new();
                out.insert(m, Rat::from_integer(1.into()));
                out
            }
        };
        self.memo.insert((i, a.clone()), result.clone());
        result
    }
}

fn monomials(weights: &[usize], cap: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    fn rec(idx: usize, weights: &[usize], left: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if idx == weights.len() {
            out.push(cur.clone());
            return;
        }
        let mut e = 0;
        while e * weights[idx] <= left {
            cur[idx] = e as u8;
            rec(idx + 1, weights, left - e * weights[idx], cur, out);
            e += 1;
        }
        cur[idx] = 0;
    }
    rec(0, weights, cap, &mut vec![0; weights.len()], &mut out);
    out
}

/// Images `ρ(e_k)` of the basis vectors, as nilpotent matrices whose
/// commutators realize the bracket.
pub fn faithful_unipotent_rep(alg: &NilLieAlgebra) -> Result<Vec<RatMatrix>, LieError> {
    let n = alg.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (p, weights) = alg.adapted_basis();
    let adapted = alg.algebra().change_basis(&p)?;
    let cap = alg.class().max(1);
    let basis = monomials(&weights, cap);
    let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let size = basis.len();
    let mut st = Straightener {
        alg: &adapted,
        weights: &weights,
        cap,
        memo: HashMap::new(),
    };
    let mut adapted_images = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = RatMatrix::zeros(size, size);
        for (col, mono) in basis.iter().enumerate() {
            for (res, c) in st.mul_gen(i, mono) {
                let row = index[&res];
                m[(row, col)] = c;
            }
        }
        adapted_images.push(m);
    }
    // e_k = Σ_i (P⁻¹)_{ik} f_i
    let inv = p.inverse()?;
    let images = (0..n)
        .map(|k| {
            (0..n).fold(RatMatrix::zeros(size, size), |acc, i| {
                let c = &inv[(i, k)];
                if c.is_zero() {
                    acc
                } else {
                    &acc + &adapted_images[i].scale(c)
                }
            })
        })
        .collect();
    Ok(images)
}

/// `ρ(x) = Σ x_k ρ(e_k)`.
pub fn rep_of_element(images: &[RatMatrix], x: &[Rat]) -> RatMatrix {
    let size = images.first().map_or(0, |m| m.rows());
    images.iter().zip(x).fold(RatMatrix::zeros(size, size), |acc, (m, c)| {
        if c.is_zero() {
            acc
        } else {
            &acc + &m.scale(c)
        }
    })
}

/// `exp(ρ(x))`, the group element in the representation.
pub fn group_image(images: &[RatMatrix], x: &[Rat]) -> RatMatrix {
    nilpotent_exp(&rep_of_element(images, x)).expect("representation images are nilpotent")
}
