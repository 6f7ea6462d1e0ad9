//! Characteristic and minimal polynomials and the Jordan–Chevalley
//! decomposition over ℚ.

use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::RatMatrix;
use super::poly::Poly;
use super::rat::{int, Rat};
use super::LinAlgError;

fn require_square(m: &RatMatrix) -> Result<usize, LinAlgError> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(LinAlgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// `det(xI − M)` by the Faddeev–LeVerrier recurrence.
pub fn charpoly(m: &RatMatrix) -> Result<Poly, LinAlgError> {
    let n = require_square(m)?;
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let id = RatMatrix::identity(n);
    let mut acc = RatMatrix::zeros(n, n);
    for k in 1..=n {
        acc = &(m * &acc) + &id.scale(&coeffs[n - k + 1]);
        let t = (m * &acc).trace();
        coeffs[n - k] = -t / int(k as i64);
    }
    Ok(Poly::new(coeffs))
}

/// Monic generator of the annihilating ideal, found as the first linear
/// dependency among `I, M, M², …` viewed as vectors.
pub fn minimal_poly(m: &RatMatrix) -> Result<Poly, LinAlgError> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut powers: Vec<Vec<Rat>> = Vec::new();
    let mut current = RatMatrix::identity(n);
    for d in 0..=n {
        let v = current.entries().to_vec();
        if d > 0 {
            let basis = RatMatrix::from_columns(&powers);
            if let Some(c) = basis.solve(&v) {
                let mut coeffs: Vec<Rat> = c.into_iter().map(|x| -x).collect();
                coeffs.push(Rat::one());
                return Ok(Poly::new(coeffs));
            }
        }
        powers.push(v);
        current = &current * m;
    }
    unreachable!("Cayley–Hamilton bounds the minimal polynomial degree")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditiveJordan {
    pub semisimple: RatMatrix,
    pub nilpotent: RatMatrix,
    /// `semisimple = poly(M)`
    pub poly: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicativeJordan {
    pub semisimple: RatMatrix,
    pub unipotent: RatMatrix,
    pub poly: Poly,
}

/// Polynomial `p` with `p(M)` the semisimple part, by Newton lifting of
/// the identity polynomial against the squarefree part of the minimal
/// polynomial, computed modulo the minimal polynomial.
pub fn semisimple_polynomial(m: &RatMatrix) -> Result<Poly, LinAlgError> {
    let n = require_square(m)?;
    let mu = minimal_poly(m)?;
    if n == 0 {
        return Ok(Poly::zero());
    }
    let f = mu.squarefree_part();
    let df = f.derivative();
    let mut p = Poly::x().rem(&mu);
    // quadratic convergence: the defect's nilpotency index halves each round
    let rounds = usize::BITS - n.leading_zeros() + 1;
    for _ in 0..=rounds {
        let defect = f.compose(&p).rem(&mu);
        if defect.is_zero() {
            return Ok(p);
        }
        let slope = df.compose(&p).rem(&mu);
        let inv = slope
            .inverse_mod(&mu)
            .expect("derivative of a squarefree part is a unit modulo the minimal polynomial");
        p = (&p - &(&defect * &inv)).rem(&mu);
    }
    debug_assert!(f.compose(&p).rem(&mu).is_zero());
    Ok(p)
}

/// `M = S + N`, `S` semisimple, `N` nilpotent, `SN = NS`, `S = p(M)`.
pub fn jordan_chevalley_additive(m: &RatMatrix) -> Result<AdditiveJordan, LinAlgError> {
    let p = semisimple_polynomial(m)?;
    let s = p.eval_matrix(m);
    let nil = m - &s;
    Ok(AdditiveJordan {
        semisimple: s,
        nilpotent: nil,
        poly: p,
    })
}

/// `M = Ms·Mu = Mu·Ms` with `Ms` semisimple and `Mu` unipotent.
pub fn jordan_chevalley_multiplicative(m: &RatMatrix) -> Result<MultiplicativeJordan, LinAlgError> {
    require_square(m)?;
    if !m.is_invertible() {
        return Err(LinAlgError::Singular);
    }
    let add = jordan_chevalley_additive(m)?;
    let inv = add.semisimple.inverse()?;
    let unipotent = &inv * m;
    Ok(MultiplicativeJordan {
        semisimple: add.semisimple,
        unipotent,
        poly: add.poly,
    })
}

/// Semisimple factor of an invertible matrix.
pub fn semisimple_factor(m: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    Ok(jordan_chevalley_multiplicative(m)?.semisimple)
}

/// Unipotent factor of an invertible matrix.
pub fn unipotent_factor(m: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    Ok(jordan_chevalley_multiplicative(m)?.unipotent)
}

/// Finite series `Σ (−1)^{k+1} (U − I)^k / k`.
pub fn nilpotent_log(u: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let n = require_square(u)?;
    if !u.is_unipotent() {
        return Err(LinAlgError::NotUnipotent);
    }
    let x = u - &RatMatrix::identity(n);
    let mut out = RatMatrix::zeros(n, n);
    let mut power = x.clone();
    for k in 1..=n.max(1) {
        if power.is_zero() {
            break;
        }
        let c = if k % 2 == 1 { int(1) } else { int(-1) } / int(k as i64);
        out = &out + &power.scale(&c);
        power = &power * &x;
    }
    Ok(out)
}

/// Finite series `Σ B^k / k!`.
pub fn nilpotent_exp(b: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let n = require_square(b)?;
    if !b.is_nilpotent() {
        return Err(LinAlgError::NotNilpotent);
    }
    Ok(exp_series(b, n))
}

fn exp_series(b: &RatMatrix, n: usize) -> RatMatrix {
    let mut out = RatMatrix::identity(n);
    let mut term = RatMatrix::identity(n);
    for k in 1..=n {
        term = (&term * b).scale(&(Rat::one() / int(k as i64)));
        if term.is_zero() {
            break;
        }
        out = &out + &term;
    }
    out
}

pub fn is_semisimple(m: &RatMatrix) -> bool {
    minimal_poly(m).map(|p| p.is_squarefree()).unwrap_or(false)
}

pub fn is_unipotent(m: &RatMatrix) -> bool {
    m.is_unipotent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat::rat;

    fn theta() -> RatMatrix {
        RatMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, -1]])
    }

    /// Cofactor expansion of det(xI − M) with polynomial entries.
    fn cofactor_charpoly(m: &RatMatrix) -> Poly {
        let n = m.rows();
        let entries: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = Poly::constant(-m[(i, j)].clone());
                        if i == j {
                            &c + &Poly::x()
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        fn det(a: &[Vec<Poly>]) -> Poly {
            let n = a.len();
            if n == 1 {
                return a[0][0].clone();
            }
            let mut acc = Poly::zero();
            for j in 0..n {
                let minor: Vec<Vec<Poly>> = a[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &a[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        det(&entries)
    }

    #[test]
    fn charpoly_examples() {
        assert_eq!(charpoly(&RatMatrix::identity(2)).unwrap(), Poly::from_ints(&[1, -2, 1]));
        let a = RatMatrix::from_i64(&[&[3, 1], &[2, 1]]);
        assert_eq!(charpoly(&a).unwrap(), cofactor_charpoly(&a));
        assert_eq!(charpoly(&a).unwrap(), Poly::from_ints(&[1, -4, 1]));
        assert_eq!(charpoly(&theta()).unwrap(), cofactor_charpoly(&theta()));
        assert_eq!(charpoly(&theta()).unwrap(), Poly::from_ints(&[-1, -1, 1, 1]));
        let r = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(-3, 7), int(2)],
            vec![int(0), rat(5, 3), rat(1, 9)],
            vec![int(4), int(-1), rat(2, 5)],
        ])
        .unwrap();
        assert_eq!(charpoly(&r).unwrap(), cofactor_charpoly(&r));
        assert!(charpoly(&RatMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn minimal_poly_examples() {
        assert_eq!(
            minimal_poly(&RatMatrix::identity(4)).unwrap(),
            Poly::from_ints(&[-1, 1])
        );
        let j = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(minimal_poly(&j).unwrap(), Poly::from_ints(&[1, -2, 1]));
        // (x − 1)(x + 1)²
        let mu = minimal_poly(&theta()).unwrap();
        assert_eq!(mu, &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[1, 2, 1]));
        assert!(mu.divides(&charpoly(&theta()).unwrap()));
    }

    #[test]
    fn jordan_of_theta_leaves_the_integers() {
        let j = jordan_chevalley_additive(&theta()).unwrap();
        assert_eq!(&j.semisimple + &j.nilpotent, theta());
        assert!(!j.semisimple.is_integral());
        assert!(j.nilpotent.is_nilpotent());
        assert!(minimal_poly(&j.semisimple).unwrap().is_squarefree());
        let m = jordan_chevalley_multiplicative(&theta()).unwrap();
        assert_eq!(m.semisimple, j.semisimple);
        assert_eq!(&m.semisimple * &m.unipotent, theta());
        assert_eq!(&m.unipotent * &m.semisimple, theta());
        assert!(m.unipotent.is_unipotent());
    }

    #[test]
    fn jordan_trivial_cases() {
        let n = RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let j = jordan_chevalley_additive(&n).unwrap();
        assert!(j.semisimple.is_zero());
        assert!(j.poly.is_zero());
        let d = RatMatrix::diagonal(&[int(2), int(-1), rat(1, 3)]);
        let j = jordan_chevalley_additive(&d).unwrap();
        assert_eq!(j.semisimple, d);
        assert_eq!(j.poly, Poly::x());
        let u = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let m = jordan_chevalley_multiplicative(&u).unwrap();
        assert!(m.semisimple.is_identity());
        assert_eq!(m.unipotent, u);
        let r = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let m = jordan_chevalley_multiplicative(&r).unwrap();
        assert_eq!(m.semisimple, r);
        assert!(m.unipotent.is_identity());
        assert_eq!(
            jordan_chevalley_multiplicative(&RatMatrix::zeros(2, 2)),
            Err(LinAlgError::Singular)
        );
    }

    #[test]
    fn log_and_exp() {
        assert!(nilpotent_log(&RatMatrix::identity(3)).unwrap().is_zero());
        let u = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(nilpotent_log(&u).unwrap(), RatMatrix::from_i64(&[&[0, 1], &[0, 0]]));
        let u3 = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(nilpotent_log(&u3).unwrap()[(0, 2)], rat(-1, 2));
        let n3 = RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(nilpotent_exp(&n3).unwrap()[(0, 2)], rat(1, 2));
        assert!(nilpotent_exp(&RatMatrix::zeros(2, 2)).unwrap().is_identity());
        assert_eq!(nilpotent_exp(&nilpotent_log(&u3).unwrap()).unwrap(), u3);
        assert_eq!(nilpotent_log(&theta()), Err(LinAlgError::NotUnipotent));
        assert_eq!(nilpotent_exp(&u), Err(LinAlgError::NotNilpotent));
    }

    #[test]
    fn semisimplicity_predicates() {
        let i = RatMatrix::identity(2);
        assert!(is_semisimple(&i) && is_unipotent(&i));
        let j = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(!is_semisimple(&j) && is_unipotent(&j));
        assert!(!is_semisimple(&theta()) && !is_unipotent(&theta()));
    }
}
