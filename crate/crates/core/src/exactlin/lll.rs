//! LLL reduction of integer lattice bases with exact rational
//! Gram–Schmidt data.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rat::{rat, Rat};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn round_rat(x: &Rat) -> BigInt {
    // nearest integer, ties toward +∞
    (x + rat(1, 2)).floor().to_integer()
}

/// Reduces the rows of `basis` (which must be linearly independent) with
/// Lovász parameter 3/4. Returns the reduced rows in order.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    let mut b: Vec<Vec<BigInt>> = basis.to_vec();
    if n <= 1 {
        return b;
    }
    let delta = rat(3, 4);
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut bb = vec![Rat::zero(); n];

    // initial Gram–Schmidt
    let mut star: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<Rat> = b[i].iter().map(|x| Rat::from_integer(x.clone())).collect();
        for j in 0..i {
            let num: Rat = b[i]
                .iter()
                .zip(&star[j])
                .map(|(x, y)| Rat::from_integer(x.clone()) * y)
                .sum();
            mu[i][j] = num / &bb[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &mu[i][j] * sk;
            }
        }
        bb[i] = v.iter().map(|x| x * x).sum();
        assert!(!bb[i].is_zero(), "LLL input rows must be independent");
        star.push(v);
    }
    drop(star);

    let reduce = |b: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<Rat>>, k: usize, l: usize| {
        if mu[k][l].abs() * Rat::from_integer(BigInt::from(2)) > Rat::one() {
            let q = round_rat(&mu[k][l]);
            let (lo, hi) = b.split_at_mut(k);
            for (x, y) in hi[0].iter_mut().zip(&lo[l]) {
                *x -= &q * y;
            }
            let qr = Rat::from_integer(q);
            mu[k][l] -= &qr;
            for i in 0..l {
                let t = &qr * &mu[l][i];
                mu[k][i] -= t;
            }
        }
    };

    let mut k = 1;
    while k < n {
        reduce(&mut b, &mut mu, k, k - 1);
        let lhs = bb[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bb[k - 1];
        if lhs < rhs {
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let m = mu[k][k - 1].clone();
            let new_b = &bb[k] + &m * &m * &bb[k - 1];
            mu[k][k - 1] = &m * &bb[k - 1] / &new_b;
            bb[k] = &bb[k - 1] * &bb[k] / &new_b;
            bb[k - 1] = new_b;
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                reduce(&mut b, &mut mu, k, l);
            }
            k += 1;
        }
    }
    b
}

/// Squared Euclidean norm.
pub fn norm2(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

/// Rows sorted by increasing norm, then lexicographically, for
/// reproducible downstream choices.
pub fn sorted_by_norm(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    rows.sort_by(|a, b| norm2(a).cmp(&norm2(b)).then_with(|| a.cmp(b)));
    rows
}

/// Largest absolute entry.
pub fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn det3(m: &[Vec<BigInt>]) -> BigInt {
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    #[test]
    fn classic_example() {
        let b = rows(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let r = lll_reduce(&b);
        assert_eq!(det3(&r).abs(), det3(&b).abs());
        assert!(r.iter().all(|v| norm2(v) <= BigInt::from(9)));
    }

    #[test]
    fn finds_integer_relation() {
        // 2·a − b = 0 for a = 0.3, b = 0.6 scaled by 10^6
        let s = 1_000_000i64;
        let b = rows(&[&[1, 0, 3 * s / 10], &[0, 1, 6 * s / 10], &[0, 0, s]]);
        let r = lll_reduce(&b);
        let first = &r[0];
        assert!(first[2].is_zero());
        assert_eq!(first[0].abs(), BigInt::from(2));
        assert_eq!(first[1].abs(), BigInt::from(1));
    }
}
