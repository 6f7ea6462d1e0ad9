//! Baker–Campbell–Hausdorff product from the Dynkin series.
//!
//! The degree-`N` part of `log(e^X e^Y)` is
//! `Σ (−1)^{n−1}/n · [X^{r₁}Y^{s₁}…X^{rₙ}Y^{sₙ}] / (N · Π rᵢ! sᵢ!)`
//! over `n ≥ 1` and pairs with `rᵢ + sᵢ ≥ 1`, `Σ (rᵢ + sᵢ) = N`, where
//! `[w₁ w₂ … w_N]` is the right-nested bracket `[w₁,[w₂,[…,w_N]]]`.
//! Collected coefficients per word are cached by degree.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::exactlin::{int, Rat};

use super::algebra::{AlgebraElement, LieAlgebra};
use super::NilLieAlgebra;

/// Words over {X = 0, Y = 1} with their coefficients in degree `N`.
type Terms = Arc<Vec<(Vec<u8>, Rat)>>;

fn cache() -> &'static Mutex<HashMap<usize, Terms>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Terms>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| acc * int(k))
}

/// Collected Dynkin coefficients of degree `n`.
pub fn dynkin_terms(degree: usize) -> Terms {
    if let Some(t) = cache().lock().unwrap().get(&degree) {
        return t.clone();
    }
    let mut acc: BTreeMap<Vec<u8>, Rat> = BTreeMap::new();
    // enumerate sequences of (r, s) pairs with r + s ≥ 1 summing to `degree`
    fn walk(remaining: usize, pairs: &mut Vec<(usize, usize)>, degree: usize, acc: &mut BTreeMap<Vec<u8>, Rat>) {
        if remaining == 0 {
            let n = pairs.len();
            let sign = if n % 2 == 1 { int(1) } else { int(-1) };
            let mut denom = int(n as i64) * int(degree as i64);
            let mut word = Vec::with_capacity(degree);
            for &(r, s) in pairs.iter() {
                denom *= factorial(r) * factorial(s);
                word.extend(std::iter::repeat(0u8).take(r));
                word.extend(std::iter::repeat(1u8).take(s));
            }
            // right-nested brackets ending in two equal letters vanish
            if word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2] {
                return;
            }
            *acc.entry(word).or_insert_with(Rat::zero) += sign / denom;
            return;
        }
        for total in 1..=remaining {
            for r in 0..=total {
                pairs.push((r, total - r));
                walk(remaining - total, pairs, degree, acc);
                pairs.pop();
            }
        }
    }
    walk(degree, &mut Vec::new(), degree, &mut acc);
    let terms: Terms = Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
    cache().lock().unwrap().insert(degree, terms.clone());
    terms
}

fn add_scaled(out: &mut [Rat], v: &[Rat], c: &Rat) {
    for (o, x) in out.iter_mut().zip(v) {
        if !x.is_zero() {
            *o += c * x;
        }
    }
}

/// BCH product truncated after degree `class`, for an algebra of that
/// nilpotency class (or less).
pub fn bch_with_class(alg: &LieAlgebra, class: usize, x: &[Rat], y: &[Rat]) -> AlgebraElement {
    let mut out: AlgebraElement = x.iter().zip(y).map(|(a, b)| a + b).collect();
    if class < 2 {
        return out;
    }
    let letters = [x.to_vec(), y.to_vec()];
    // right-nested brackets share suffixes; memoize them per call
    let mut suffix: HashMap<Vec<u8>, AlgebraElement> = HashMap::new();
    for degree in 2..=class {
        for (word, coeff) in dynkin_terms(degree).iter() {
            let v = nested(alg, &letters, word, &mut suffix);
            add_scaled(&mut out, &v, coeff);
        }
    }
    out
}

fn nested(
    alg: &LieAlgebra,
    letters: &[AlgebraElement; 2],
    word: &[u8],
    memo: &mut HashMap<Vec<u8>, AlgebraElement>,
) -> AlgebraElement {
    if word.len() == 1 {
        return letters[word[0] as usize].clone();
    }
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let tail = nested(alg, letters, &word[1..], memo);
    let v = if tail.iter().all(|t| t.is_zero()) {
        tail
    } else {
        alg.bracket(&letters[word[0] as usize], &tail)
    };
    memo.insert(word.to_vec(), v.clone());
    v
}

/// `X ∗ Y = log(exp X · exp Y)` in exponential coordinates.
pub fn bch_product(alg: &NilLieAlgebra, x: &[Rat], y: &[Rat]) -> AlgebraElement {
    bch_with_class(alg.algebra(), alg.class(), x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{nilpotent_exp, nilpotent_log, rat, RatMatrix};

    #[test]
    fn low_degree_coefficients() {
        let d2: BTreeMap<Vec<u8>, Rat> = dynkin_terms(2).iter().cloned().collect();
        // XY and YX words both appear; net coefficient 1/2 on [X,Y]
        assert_eq!(d2[&vec![0, 1]].clone() - d2[&vec![1, 0]].clone(), rat(1, 2));
        let d3: BTreeMap<Vec<u8>, Rat> = dynkin_terms(3).iter().cloned().collect();
        let get = |w: &[u8]| d3.get(w).cloned().unwrap_or_default();
        // [X,[Y,X]] = −[X,[X,Y]]: net coefficient 1/12 on [X,[X,Y]]
        assert_eq!(get(&[0, 0, 1]) - get(&[0, 1, 0]), rat(1, 12));
        // net coefficient −1/12 on [Y,[X,Y]]
        let yxy = d3.get(&vec![1, 0, 1]).cloned().unwrap_or_default();
        let yyx = d3.get(&vec![1, 1, 0]).cloned().unwrap_or_default();
        assert_eq!(yxy - yyx, rat(-1, 12));
    }

    #[test]
    fn heisenberg_product() {
        let h = NilLieAlgebra::heisenberg();
        let e1 = vec![int(1), int(0), int(0)];
        let e2 = vec![int(0), int(1), int(0)];
        assert_eq!(bch_product(&h, &e1, &e2), vec![int(1), int(1), rat(1, 2)]);
    }

    /// Matrix oracle: e1 = E12 + E23 and e2 = E34 give [e1,e2] = E24 and
    /// [e1,[e1,e2]] = E14, a copy of the filiform algebra.
    #[test]
    fn filiform_against_matrices() {
        let f = NilLieAlgebra::filiform4();
        let e1 = vec![int(1), int(0), int(0), int(0)];
        let e2 = vec![int(0), int(1), int(0), int(0)];
        let z = bch_product(&f, &e1, &e2);
        assert_eq!(z[3], rat(1, 12));
        assert_eq!(z[2], rat(1, 2));

        let mut n = RatMatrix::zeros(4, 4);
        n[(0, 1)] = int(1);
        n[(1, 2)] = int(1);
        let mut m2 = RatMatrix::zeros(4, 4);
        m2[(2, 3)] = int(1);
        let br = |a: &RatMatrix, b: &RatMatrix| &(a * b) - &(b * a);
        let m3 = br(&n, &m2);
        let m4 = br(&n, &m3);
        assert!(!m4.is_zero());
        let prod = &nilpotent_exp(&n).unwrap() * &nilpotent_exp(&m2).unwrap();
        let log = nilpotent_log(&prod).unwrap();
        let basis = [n.clone(), m2.clone(), m3.clone(), m4.clone()];
        let expected = basis
            .iter()
            .zip(&z)
            .fold(RatMatrix::zeros(4, 4), |acc, (b, c)| &acc + &b.scale(c));
        assert_eq!(log, expected);
    }

    #[test]
    fn abelian_is_addition() {
        let a = NilLieAlgebra::abelian(3);
        let x = vec![rat(1, 2), int(3), int(-1)];
        let y = vec![int(2), rat(-1, 3), int(0)];
        assert_eq!(bch_product(&a, &x, &y), vec![rat(5, 2), rat(8, 3), int(-1)]);
    }
}
