//! Closures `K` of finitely generated groups of commuting semisimple
//! matrices with spectrum on the unit circle, described by a torus rank
//! and the orders of the finite part.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::exactlin::lll::{lll_reduce, max_abs};
use crate::exactlin::{is_semisimple, spectrum_certificate, IntMatrix, RatMatrix, SpectrumCertificate};
use crate::splitting::relations::{joint_spectrum, relation_lattice};
use crate::splitting::{Exactness, Heuristics, SplittingError, Warning};

use super::HullError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureDescription {
    pub generators: Vec<RatMatrix>,
    pub certificates: Vec<SpectrumCertificate>,
    /// Dimension of the identity component `K⁰`.
    pub torus_rank: usize,
    /// Invariant factors `> 1` of the component group.
    pub finite_orders: Vec<u64>,
    /// `Λ₁ = { m : Π g_i^{m_i} = I on the torsion part }`.
    pub torsion_lattice: IntMatrix,
    /// Column basis of the subspace on which every generator has finite
    /// order; it is the fixed space of `K⁰`.
    pub torsion_space: RatMatrix,
    pub exactness: Exactness,
    pub warnings: Vec<Warning>,
}

impl ClosureDescription {
    pub fn finite_order(&self) -> u64 {
        self.finite_orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.torus_rank == 0 && self.finite_orders.is_empty()
    }
}

/// Rank of the character relation module: integer vectors `n ∈ ℤ^d` with
/// `Σ_j n_j a_ij ≈ 0 mod 1` for every generator `i`.
fn character_relation_rank(angles: &[Vec<BigInt>], shift: usize) -> usize {
    let k = angles.len();
    let d = angles.first().map_or(0, |a| a.len());
    let scale = BigInt::one() << shift;
    let mut rows = Vec::with_capacity(d + k);
    for j in 0..d {
        let mut r = vec![BigInt::zero(); d + k];
        r[j] = BigInt::one();
        for i in 0..k {
            r[d + i] = angles[i][j].clone();
        }
        rows.push(r);
    }
    for i in 0..k {
        let mut r = vec![BigInt::zero(); d + k];
        r[d + i] = scale.clone();
        rows.push(r);
    }
    // genuine relations have short heads and tails of rounding size, the
    // remaining reduced vectors have both near det^(1/(d+k))
    let bound = BigInt::one() << (shift / 4);
    let found: Vec<Vec<BigInt>> = lll_reduce(&rows)
        .into_iter()
        .filter(|r| r[..d].iter().any(|x| !x.is_zero()) && max_abs(&r[..d]) <= bound && max_abs(&r[d..]) <= bound)
        .map(|r| r[..d].to_vec())
        .collect();
    if found.is_empty() {
        0
    } else {
        IntMatrix::from_rows(found, d).row_lattice_basis().rows()
    }
}

/// Closure of the group generated by commuting semisimple matrices with
/// certified modulus-one spectra.
///
/// Exact when the generated group is finite, or when the non-torsion part
/// carries a single pair of complex-conjugate characters: the image there
/// is an infinite subgroup of a circle, hence dense. Otherwise the torus
/// rank comes from the numeric relation tier and is flagged heuristic.
pub fn compact_closure(gens: &[RatMatrix], heur: &Heuristics) -> Result<ClosureDescription, HullError> {
    let mut certificates = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let cert = spectrum_certificate(g)?;
        if !cert.is_modulus_one() {
            return Err(HullError::NotModulusOne(format!("generator {i}: {}", cert.label())));
        }
        if !is_semisimple(g) {
            return Err(SplittingError::NotAnAutomorphism(format!("generator {i} is not semisimple")).into());
        }
        certificates.push(cert);
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_with(&gens[j]) {
                return Err(SplittingError::NonCommuting { i, j }.into());
            }
        }
    }
    let rel = relation_lattice(gens, heur)?;
    let mut warnings = Vec::new();
    let (torus_rank, exactness) = if rel.free_space.cols() == 0 {
        (0, Exactness::Exact)
    } else {
        let ts: Vec<RatMatrix> = gens
            .iter()
            .map(|g| g.restrict(&rel.free_space).expect("free part is invariant"))
            .collect();
        let spec = joint_spectrum(&ts, heur)?;
        let d = spec.separating.degree().unwrap_or(0);
        if d == 2 {
            (1, Exactness::Exact)
        } else {
            let rank = d - character_relation_rank(&spec.angles, spec.shift);
            warnings.push(Warning::HeuristicReliance {
                context: format!("torus rank {rank} of the compact closure from {d} joint characters"),
                precision_bits: heur.precision_bits,
            });
            (rank, Exactness::Heuristic)
        }
    };
    let finite_orders = if gens.is_empty() {
        Vec::new()
    } else {
        rel.torsion_lattice
            .invariant_factors()
            .into_iter()
            .filter(|f| !f.is_one())
            .map(|f| f.to_u64().expect("small order"))
            .collect()
    };
    Ok(ClosureDescription {
        generators: gens.to_vec(),
        certificates,
        torus_rank,
        finite_orders,
        torsion_lattice: rel.torsion_lattice,
        torsion_space: rel.torsion_space,
        exactness,
        warnings,
    })
}
