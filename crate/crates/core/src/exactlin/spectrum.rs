//! Exact certificates for the position of a spectrum relative to the unit
//! circle.
//!
//! The characteristic polynomial has the same roots as the one of the
//! semisimple part, so the analysis runs on its squarefree part:
//! cyclotomic factors are divided out first; whatever remains contains no
//! root of unity and is classified with Sturm sequences. A squarefree
//! rational polynomial has all roots on the unit circle and none real iff
//! it is reciprocal of even degree and its trace polynomial
//! `g(x + 1/x) = x^{-d} p(x)` has all its roots in `(−2, 2)`.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::jordan::charpoly;
use super::matrix::RatMatrix;
use super::poly::{cyclotomic, phi_preimage, Poly};
use super::rat::{fmt_rat, int};
use super::LinAlgError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SpectrumCertificate {
    RootsOfUnity { order: u64 },
    ModulusOneIrrational { witness: String },
    NotModulusOne { witness: String },
    Inconclusive { reason: String },
}

impl SpectrumCertificate {
    pub fn is_modulus_one(&self) -> bool {
        matches!(
            self,
            SpectrumCertificate::RootsOfUnity { .. } | SpectrumCertificate::ModulusOneIrrational { .. }
        )
    }

    pub fn is_torsion(&self) -> bool {
        matches!(self, SpectrumCertificate::RootsOfUnity { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SpectrumCertificate::RootsOfUnity { .. } => "RootsOfUnity",
            SpectrumCertificate::ModulusOneIrrational { .. } => "ModulusOneIrrational",
            SpectrumCertificate::NotModulusOne { .. } => "NotModulusOne",
            SpectrumCertificate::Inconclusive { .. } => "Inconclusive",
        }
    }
}

/// Squarefree part of a polynomial split into its cyclotomic factors and a
/// remainder free of roots of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclotomicSplit {
    pub indices: Vec<u64>,
    pub remainder: Poly,
}

impl CyclotomicSplit {
    /// Product of the cyclotomic factors found.
    pub fn cyclotomic_part(&self) -> Poly {
        self.indices.iter().fold(Poly::one(), |acc, &n| &acc * &cyclotomic(n))
    }

    pub fn order(&self) -> u64 {
        self.indices.iter().fold(1u64, |acc, &n| acc.lcm(&n))
    }
}

pub fn split_cyclotomic(p: &Poly) -> CyclotomicSplit {
    let mut rest = p.squarefree_part();
    let mut indices = Vec::new();
    let deg = rest.degree().unwrap_or(0) as u64;
    for d in 1..=deg {
        for n in phi_preimage(d) {
            let phi = cyclotomic(n);
            if phi.divides(&rest) {
                rest = rest.div_rem(&phi).0;
                indices.push(n);
            }
        }
    }
    indices.sort_unstable();
    CyclotomicSplit {
        indices,
        remainder: rest.monic(),
    }
}

/// Classifies a polynomial without roots of unity among its roots.
pub fn classify_noncyclotomic(h: &Poly) -> SpectrumCertificate {
    let h = h.squarefree_part().monic();
    let Some(deg) = h.degree() else {
        return SpectrumCertificate::Inconclusive {
            reason: "zero polynomial".into(),
        };
    };
    if deg == 0 {
        return SpectrumCertificate::Inconclusive {
            reason: "no non-torsion eigenvalues".into(),
        };
    }
    if h.coeff(0).is_zero() {
        return SpectrumCertificate::NotModulusOne {
            witness: "eigenvalue 0".into(),
        };
    }
    let real = h.count_all_real_roots();
    if real > 0 {
        return SpectrumCertificate::NotModulusOne {
            witness: format!("{h} has {real} real root(s), none equal to 1 or -1"),
        };
    }
    if !h.is_reciprocal() {
        return SpectrumCertificate::NotModulusOne {
            witness: format!("{h} is not reciprocal, so its root set is not closed under inversion"),
        };
    }
    let Some(g) = h.trace_polynomial() else {
        return SpectrumCertificate::Inconclusive {
            reason: format!("{h} has no trace polynomial"),
        };
    };
    let d = deg / 2;
    let inside = g.count_real_roots(&int(-2), &int(2)) - usize::from(g.eval(&int(2)).is_zero());
    if inside == d {
        let witness = if d == 1 {
            // x² − 2c·x + 1 with rational c
            let c = -h.coeff(1) / int(2);
            format!(
                "Niven: {h} has roots exp(±iφ) with cos φ = {}, rational and outside {{0, ±1/2, ±1}}",
                fmt_rat(&c)
            )
        } else {
            format!("trace polynomial {g} has all {d} roots in (-2, 2) and no cyclotomic factor remains")
        };
        SpectrumCertificate::ModulusOneIrrational { witness }
    } else {
        SpectrumCertificate::NotModulusOne {
            witness: format!("trace polynomial {g} has only {inside} of {d} roots in (-2, 2)"),
        }
    }
}

/// Certificate for the eigenvalues of an invertible matrix.
pub fn spectrum_certificate(m: &RatMatrix) -> Result<SpectrumCertificate, LinAlgError> {
    let chi = charpoly(m)?;
    if chi.coeff(0).is_zero() {
        return Err(LinAlgError::Singular);
    }
    Ok(certificate_of_poly(&chi))
}

/// Same classification applied to an arbitrary polynomial with nonzero
/// constant term.
pub fn certificate_of_poly(p: &Poly) -> SpectrumCertificate {
    let split = split_cyclotomic(p);
    if split.remainder.is_constant() {
        return SpectrumCertificate::RootsOfUnity { order: split.order() };
    }
    classify_noncyclotomic(&split.remainder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat::rat;

    #[test]
    fn rotation_by_quarter_turn() {
        let r = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(
            spectrum_certificate(&r).unwrap(),
            SpectrumCertificate::RootsOfUnity { order: 4 }
        );
    }

    #[test]
    fn hyperbolic_matrix() {
        let a = RatMatrix::from_i64(&[&[3, 1], &[2, 1]]);
        let c = spectrum_certificate(&a).unwrap();
        assert!(matches!(c, SpectrumCertificate::NotModulusOne { .. }), "{c:?}");
    }

    #[test]
    fn rational_cosine_rotation() {
        let a = RatMatrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(6, 5)]]).unwrap();
        let c = spectrum_certificate(&a).unwrap();
        match c {
            SpectrumCertificate::ModulusOneIrrational { witness } => {
                assert!(witness.contains("3/5"), "{witness}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_and_singular() {
        let rot = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let hyp = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let c = spectrum_certificate(&rot.block_diag(&hyp)).unwrap();
        assert!(matches!(c, SpectrumCertificate::NotModulusOne { .. }));
        assert_eq!(
            spectrum_certificate(&RatMatrix::zeros(2, 2)),
            Err(LinAlgError::Singular)
        );
        // eigenvalue 2 and 1/2 on a reciprocal polynomial with real roots
        let d = RatMatrix::diagonal(&[int(2), rat(1, 2)]);
        assert!(matches!(
            spectrum_certificate(&d).unwrap(),
            SpectrumCertificate::NotModulusOne { .. }
        ));
    }

    #[test]
    fn non_quadratic_modulus_one() {
        // product of two rational-cosine rotation pairs, degree 4 irreducible
        // only if the cosines differ: (x² − 6/5x + 1)(x² − 10/13x + 1)
        let p = &Poly::new(vec![int(1), rat(-6, 5), int(1)]) * &Poly::new(vec![int(1), rat(-10, 13), int(1)]);
        assert!(matches!(
            certificate_of_poly(&p),
            SpectrumCertificate::ModulusOneIrrational { .. }
        ));
        // Salem-type: x⁴ − x³ − x² − x + 1 has two real roots off the circle
        let salem = Poly::from_ints(&[1, -1, -1, -1, 1]);
        assert!(matches!(
            certificate_of_poly(&salem),
            SpectrumCertificate::NotModulusOne { .. }
        ));
    }

    #[test]
    fn kronecker_companions() {
        for idx in [vec![1u64], vec![3, 4], vec![5], vec![2, 6, 12], vec![7]] {
            let p = idx.iter().fold(Poly::one(), |a, &n| &a * &cyclotomic(n));
            let expected = idx.iter().fold(1u64, |a, &n| a.lcm(&n));
            assert_eq!(
                certificate_of_poly(&p),
                SpectrumCertificate::RootsOfUnity { order: expected }
            );
        }
    }
}
