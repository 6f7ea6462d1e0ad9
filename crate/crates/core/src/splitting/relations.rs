//! The relation lattice `Λ = { m ∈ ℤ^k : Π S_i^{m_i} = I }` of a family of
//! commuting semisimple matrices.
//!
//! The space splits as `V ⊕ W`: on `V` every `S_i` has finite order, on
//! each joint eigenline of `W` some `S_i` has an eigenvalue that is not a
//! root of unity. Relations on `V` come from enumerating the finite group
//! generated by the restrictions. Relations on `W` are found by LLL on
//! the arguments and log-moduli of the joint eigenvalues, each candidate
//! is verified by exact matrix arithmetic, and the result is certified
//! whenever it reaches rank `k − 1`, the largest rank possible on `W ≠ 0`.

use std::collections::{HashMap, VecDeque};

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exactlin::lll::{lll_reduce, max_abs};
use crate::exactlin::numeric::{complex_roots, Complex, Context};
use crate::exactlin::spectrum::split_cyclotomic;
use crate::exactlin::{minimal_poly, IntMatrix, Poly, Rat, RatMatrix};

use super::{Exactness, Heuristics, SplittingError, Warning};

const MAX_GROUP: usize = 200_000;
const MAX_ORDER: u64 = 100_000;
const MAX_RELATION_ENTRY: i64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationLattice {
    /// Basis of `Λ` as rows in Hermite form.
    pub basis: IntMatrix,
    /// `Λ₁ = { m : S^m = I on V }`, which contains `Λ`.
    pub torsion_lattice: IntMatrix,
    /// Column basis of `V`.
    pub torsion_space: RatMatrix,
    /// Column basis of `W`.
    pub free_space: RatMatrix,
    pub exactness: Exactness,
    pub warnings: Vec<Warning>,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Membership of an exponent vector.
    pub fn contains(&self, m: &[i64]) -> bool {
        lattice_contains(&self.basis, m)
    }
}

/// `m` is an integer combination of the rows of `basis` (rows independent).
pub fn lattice_contains(basis: &IntMatrix, m: &[i64]) -> bool {
    let k = m.len();
    if basis.rows() == 0 {
        return m.iter().all(|&x| x == 0);
    }
    let target: Vec<Rat> = m.iter().map(|&x| Rat::from_integer(x.into())).collect();
    // solve t · B = m, i.e. Bᵀ t = m
    match basis.to_rat().transpose().solve(&target) {
        Some(t) => {
            t.iter().all(|x| x.is_integer())
                && (0..k).all(|j| {
                    let s: Rat = (0..basis.rows())
                        .map(|i| &t[i] * Rat::from_integer(basis[(i, j)].clone()))
                        .sum();
                    s == target[j]
                })
        }
        None => false,
    }
}

fn hnf_of(rows: Vec<Vec<BigInt>>, k: usize) -> IntMatrix {
    if rows.is_empty() {
        return IntMatrix::zeros(0, k);
    }
    let m = IntMatrix::from_rows(rows, k);
    let h = m.row_lattice_basis();
    if h.rows() == 0 {
        IntMatrix::zeros(0, k)
    } else {
        h
    }
}

/// `Π A_i^{m_i}` for commuting invertible matrices.
pub fn power_product(mats: &[RatMatrix], m: &[BigInt]) -> Result<RatMatrix, SplittingError> {
    let n = mats.first().map_or(0, |a| a.rows());
    let mut out = RatMatrix::identity(n);
    for (a, e) in mats.iter().zip(m) {
        if e.is_zero() {
            continue;
        }
        let mag = e
            .abs()
            .to_u64()
            .ok_or_else(|| SplittingError::Numeric(format!("exponent {e} too large")))?;
        let base = if e.is_negative() { a.inverse()? } else { a.clone() };
        out = &out * &base.pow_u(mag);
    }
    Ok(out)
}

fn order_of(m: &RatMatrix) -> Result<u64, SplittingError> {
    let mut acc = m.clone();
    for d in 1..=MAX_ORDER {
        if acc.is_identity() {
            return Ok(d);
        }
        acc = &acc * m;
    }
    Err(SplittingError::Numeric(format!(
        "matrix has no finite order below {MAX_ORDER}"
    )))
}

/// Relation lattice of commuting matrices of finite order, by enumerating
/// the generated group and collecting Schreier relations.
pub fn finite_relations(mats: &[RatMatrix]) -> Result<IntMatrix, SplittingError> {
    let k = mats.len();
    if k == 0 {
        return Ok(IntMatrix::zeros(0, 0));
    }
    let n = mats[0].rows();
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    for (i, m) in mats.iter().enumerate() {
        let ord = order_of(m)?;
        let mut r = vec![BigInt::zero(); k];
        r[i] = BigInt::from(ord);
        relations.push(r);
    }
    let mut seen: HashMap<RatMatrix, Vec<i64>> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(RatMatrix::identity(n), vec![0; k]);
    queue.push_back((RatMatrix::identity(n), vec![0i64; k]));
    while let Some((g, a)) = queue.pop_front() {
        for (i, s) in mats.iter().enumerate() {
            let h = &g * s;
            let mut b = a.clone();
            b[i] += 1;
            match seen.get(&h) {
                Some(prev) => {
                    if *prev != b {
                        relations.push(b.iter().zip(prev).map(|(x, y)| BigInt::from(x - y)).collect());
                    }
                }
                None => {
                    if seen.len() >= MAX_GROUP {
                        return Err(SplittingError::Numeric(format!(
                            "finite group exceeds {MAX_GROUP} elements"
                        )));
                    }
                    seen.insert(h.clone(), b.clone());
                    queue.push_back((h, b));
                }
            }
        }
    }
    Ok(hnf_of(relations, k))
}

/// `{ m ∈ L : Π mats_i^{m_i} = I }` for a lattice `L` (rows) on which the
/// map has finite image.
fn kernel_on_lattice(lattice: &IntMatrix, mats: &[RatMatrix]) -> Result<IntMatrix, SplittingError> {
    let k = lattice.cols();
    if lattice.rows() == 0 {
        return Ok(IntMatrix::zeros(0, k));
    }
    let images = (0..lattice.rows())
        .map(|r| power_product(mats, &lattice.row(r)))
        .collect::<Result<Vec<_>, _>>()?;
    let t = finite_relations(&images)?;
    if t.rows() == 0 {
        return Ok(IntMatrix::zeros(0, k));
    }
    Ok((&t * lattice).row_lattice_basis())
}

/// `ℚ-span(L) ∩ ℤ^k`.
fn saturate(lattice: &IntMatrix) -> IntMatrix {
    let k = lattice.cols();
    let r = lattice.rows();
    if r == 0 {
        return IntMatrix::zeros(0, k);
    }
    let orth = lattice.to_rat().kernel();
    if orth.cols() == 0 {
        return IntMatrix::identity(k);
    }
    // integer rows spanning the orthogonal complement
    let rows: Vec<Vec<BigInt>> = orth
        .columns()
        .into_iter()
        .map(|col| {
            let l = col
                .iter()
                .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            col.iter()
                .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    IntMatrix::from_rows(rows, k).integer_kernel()
}

/// Joint eigenvalue data of commuting semisimple matrices on a space where
/// they generate a commutative algebra `ℚ[R]`.
pub struct JointSpectrum {
    /// Minimal polynomial of the separating element `R`.
    pub separating: Poly,
    /// `T_i = p_i(R)`.
    pub polys: Vec<Poly>,
    /// `round(2^shift · arg λ_ij / 2π)`, indexed `[i][j]`.
    pub angles: Vec<Vec<BigInt>>,
    /// `round(2^shift · ln |λ_ij|)`.
    pub logs: Vec<Vec<BigInt>>,
    pub shift: usize,
}

fn flatten(m: &RatMatrix) -> Vec<Rat> {
    m.entries().to_vec()
}

/// Finds `R = Σ t^i T_i` whose powers span every `T_i`, then evaluates
/// the joint eigenvalues at the roots of its minimal polynomial.
pub fn joint_spectrum(ts: &[RatMatrix], heur: &Heuristics) -> Result<JointSpectrum, SplittingError> {
    let n = ts[0].rows();
    let mut found = None;
    for t in 1..=(4 * n as i64 + 8) {
        let mut r = RatMatrix::zeros(n, n);
        let mut c = Rat::one();
        for m in ts {
            r = &r + &m.scale(&c);
            c *= Rat::from_integer(t.into());
        }
        let mu = minimal_poly(&r)?;
        let deg = mu.degree().unwrap_or(0);
        let mut powers = Vec::with_capacity(deg);
        let mut p = RatMatrix::identity(n);
        for _ in 0..deg {
            powers.push(flatten(&p));
            p = &p * &r;
        }
        let span = RatMatrix::from_columns(&powers);
        let polys: Option<Vec<Poly>> = ts.iter().map(|m| span.solve(&flatten(m)).map(Poly::new)).collect();
        if let Some(polys) = polys {
            found = Some((mu, polys));
            break;
        }
    }
    let (separating, polys) = found.ok_or_else(|| SplittingError::Numeric("no separating combination found".into()))?;
    let mut ctx = Context::new(heur.precision_bits);
    let roots = complex_roots(&ctx, &separating).map_err(|e| SplittingError::Numeric(e.to_string()))?;
    let shift = heur.precision_bits.saturating_sub(24).max(32);
    let mut angles = Vec::with_capacity(ts.len());
    let mut logs = Vec::with_capacity(ts.len());
    for p in &polys {
        let vals: Vec<Complex> = roots.iter().map(|z| ctx.eval(p, z)).collect();
        let a: Vec<BigFloat> = vals.iter().map(|v| ctx.turns(v)).collect();
        let l: Vec<BigFloat> = vals.iter().map(|v| ctx.ln_abs(v)).collect();
        angles.push(a.iter().map(|x| ctx.scaled_round(x, shift)).collect());
        logs.push(l.iter().map(|x| ctx.scaled_round(x, shift)).collect());
    }
    Ok(JointSpectrum {
        separating,
        polys,
        angles,
        logs,
        shift,
    })
}

/// Integer relations `m` with `Σ m_i a_ij ≈ 0 mod 1` and `Σ m_i l_ij ≈ 0`
/// for all `j`, as short vectors of an LLL-reduced lattice.
fn candidate_relations(spec: &JointSpectrum, k: usize) -> Vec<Vec<BigInt>> {
    let d = spec.angles.first().map_or(0, |a| a.len());
    let scale = BigInt::one() << spec.shift;
    let width = k + 2 * d;
    let mut rows = Vec::with_capacity(k + d);
    for i in 0..k {
        let mut r = vec![BigInt::zero(); width];
        r[i] = BigInt::one();
        for j in 0..d {
            r[k + j] = spec.angles[i][j].clone();
            r[k + d + j] = spec.logs[i][j].clone();
        }
        rows.push(r);
    }
    for j in 0..d {
        let mut r = vec![BigInt::zero(); width];
        r[k + j] = scale.clone();
        rows.push(r);
    }
    let bound = BigInt::one() << (spec.shift / 2);
    lll_reduce(&rows)
        .into_iter()
        .filter(|r| r[..k].iter().any(|x| !x.is_zero()) && max_abs(&r[k..]) <= bound)
        .map(|r| r[..k].to_vec())
        .collect()
}

/// Relations of matrices restricted to `W`, with `k ≥ 2` and at least one
/// non-torsion eigenvalue on every joint eigenline.
fn free_relations(ts: &[RatMatrix], heur: &Heuristics) -> Result<(IntMatrix, Exactness, Vec<Warning>), SplittingError> {
    let k = ts.len();
    let spec = joint_spectrum(ts, heur)?;
    let mut verified = Vec::new();
    for cand in candidate_relations(&spec, k) {
        if max_abs(&cand) > BigInt::from(MAX_RELATION_ENTRY) {
            continue;
        }
        if power_product(ts, &cand)?.is_identity() {
            verified.push(cand);
        }
    }
    let found = hnf_of(verified, k);
    let sat = saturate(&found);
    let lattice = kernel_on_lattice(&sat, ts)?;
    if lattice.rows() + 1 == k {
        Ok((lattice, Exactness::Exact, Vec::new()))
    } else {
        let warning = Warning::HeuristicReliance {
            context: format!(
                "relation lattice on the non-torsion part has rank {} < {}; absence of further relations is not certified",
                lattice.rows(),
                k - 1
            ),
            precision_bits: heur.precision_bits,
        };
        Ok((lattice, Exactness::Heuristic, vec![warning]))
    }
}

/// `V = ∩ ker c_i(S_i)` and `W = Σ ker h_i(S_i)` where `c_i` collects the
/// cyclotomic factors of the minimal polynomial of `S_i` and `h_i` the rest.
pub fn torsion_split(mats: &[RatMatrix], n: usize) -> Result<(RatMatrix, RatMatrix), SplittingError> {
    let mut v = RatMatrix::identity(n);
    let mut w = RatMatrix::zeros(n, 0);
    for s in mats {
        let split = split_cyclotomic(&minimal_poly(s)?);
        let c = split.cyclotomic_part().eval_matrix(s);
        v = v.span_intersection(&c.kernel());
        if !split.remainder.is_constant() {
            w = w.span_sum(&split.remainder.eval_matrix(s).kernel());
        }
    }
    Ok((v, w))
}

/// The relation lattice of commuting semisimple matrices on a common space.
pub fn relation_lattice(mats: &[RatMatrix], heur: &Heuristics) -> Result<RelationLattice, SplittingError> {
    let k = mats.len();
    let n = mats.first().map_or(0, |m| m.rows());
    if k == 0 {
        return Ok(RelationLattice {
            basis: IntMatrix::zeros(0, 0),
            torsion_lattice: IntMatrix::zeros(0, 0),
            torsion_space: RatMatrix::identity(n),
            free_space: RatMatrix::zeros(n, 0),
            exactness: Exactness::Exact,
            warnings: Vec::new(),
        });
    }
    let (v, w) = torsion_split(mats, n)?;
    let restrict = |basis: &RatMatrix| -> Result<Vec<RatMatrix>, SplittingError> {
        mats.iter()
            .map(|m| {
                m.restrict(basis)
                    .ok_or_else(|| SplittingError::Shape("subspace is not invariant".into()))
            })
            .collect()
    };
    let on_v = if v.cols() > 0 { restrict(&v)? } else { Vec::new() };
    let torsion_lattice = if v.cols() > 0 {
        finite_relations(&on_v)?
    } else {
        IntMatrix::identity(k)
    };

    let (free, exactness, warnings) = if w.cols() == 0 {
        (IntMatrix::identity(k), Exactness::Exact, Vec::new())
    } else if k == 1 {
        (IntMatrix::zeros(0, 1), Exactness::Exact, Vec::new())
    } else {
        free_relations(&restrict(&w)?, heur)?
    };
    let basis = if v.cols() > 0 {
        kernel_on_lattice(&free, &on_v)?
    } else {
        free
    };
    Ok(RelationLattice {
        basis,
        torsion_lattice,
        torsion_space: v,
        free_space: w,
        exactness,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, rat};

    fn rot(c: Rat, s: Rat) -> RatMatrix {
        RatMatrix::from_rows(vec![vec![c.clone(), -s.clone()], vec![s, c]]).unwrap()
    }

    #[test]
    fn finite_group_relations() {
        let r4 = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let r2 = r4.pow_u(2);
        let l = finite_relations(&[r4, r2]).unwrap();
        // m₁ + 2m₂ ≡ 0 mod 4
        assert_eq!(l.lattice_index().unwrap(), BigInt::from(4));
        assert!(lattice_contains(&l, &[2, -1]));
        assert!(lattice_contains(&l, &[0, 2]));
        assert!(!lattice_contains(&l, &[1, 0]));
    }

    #[test]
    fn single_irrational_rotation() {
        let a = rot(rat(3, 5), rat(4, 5));
        let l = relation_lattice(&[a], &Heuristics::default()).unwrap();
        assert_eq!(l.rank(), 0);
        assert_eq!(l.exactness, Exactness::Exact);
    }

    #[test]
    fn power_relation_is_found_and_certified() {
        let a = rot(rat(3, 5), rat(4, 5));
        let a2 = a.pow_u(2);
        let l = relation_lattice(&[a, a2], &Heuristics::default()).unwrap();
        assert_eq!(l.exactness, Exactness::Exact);
        assert_eq!(l.basis, IntMatrix::from_i64(&[&[2, -1]]));
    }

    #[test]
    fn mixed_torsion_and_free() {
        // A = R(3/5) ⊕ (−1), B = I ⊕ (−1): relations m with m_A = 0, m_B even
        let a = rot(rat(3, 5), rat(4, 5)).block_diag(&RatMatrix::from_i64(&[&[-1]]));
        let b = RatMatrix::identity(2).block_diag(&RatMatrix::from_i64(&[&[-1]]));
        let l = relation_lattice(&[a, b], &Heuristics::default()).unwrap();
        assert_eq!(l.basis, IntMatrix::from_i64(&[&[0, 2]]));
        assert_eq!(l.exactness, Exactness::Exact);
        assert_eq!(l.torsion_space.cols(), 1);
        assert_eq!(l.free_space.cols(), 2);
    }

    #[test]
    fn independent_rotations_are_heuristic() {
        let a = rot(rat(3, 5), rat(4, 5)).block_diag(&RatMatrix::identity(2));
        let b = RatMatrix::identity(2).block_diag(&rot(rat(5, 13), rat(12, 13)));
        let l = relation_lattice(&[a, b], &Heuristics::default()).unwrap();
        assert_eq!(l.rank(), 0);
        assert_eq!(l.exactness, Exactness::Heuristic);
        assert_eq!(l.warnings.len(), 1);
    }

    #[test]
    fn hyperbolic_pair() {
        // α ⊗ I and I ⊗ α with α = [[3,1],[2,1]]: relations only m = 0
        let alpha = RatMatrix::from_i64(&[&[3, 1], &[2, 1]]);
        let i2 = RatMatrix::identity(2);
        let l = relation_lattice(&[alpha.kron(&i2), i2.kron(&alpha)], &Heuristics::default()).unwrap();
        assert_eq!(l.rank(), 0);
        // and α ⊗ α⁻¹ relation: A·B⁻¹ on the diagonal-type character
        let inv = alpha.inverse().unwrap();
        let l2 = relation_lattice(&[alpha.kron(&i2), inv.kron(&i2)], &Heuristics::default()).unwrap();
        assert_eq!(l2.basis, IntMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(l2.exactness, Exactness::Exact);
        let _ = int(0);
    }
}
