//! Property checks run by the `suite` command, each returning a named
//! pass/fail outcome.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactlin::{semisimple_factor, IntMatrix, RatMatrix};
use crate::hull::{
    algebraic_hull, check_equivalences, g_an, golden_models, growth_degree, growth_degree_via_matrices,
    hull_invariants, tensor_lattice_model, verify_hull, HullError,
};
use crate::splitting::ops::{beta, image_identity_holds, in_c_family, minimal_splitting};
use crate::splitting::{semisimple_aut, GroupModel, Heuristics, ModelElement, SplittingError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String), String>) -> Self {
        match r {
            Ok((passed, detail)) => CheckOutcome::new(name, passed, detail),
            Err(e) => CheckOutcome::new(name, false, e),
        }
    }
}

/// Product of random elementary row operations and a signed permutation:
/// an integer matrix of determinant `±1` with small entries.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let mut e = RatMatrix::identity(n);
        e[(i, j)] = crate::exactlin::int(if rng.gen_bool(0.5) { 1 } else { -1 });
        m = &m * &e;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut p = RatMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = crate::exactlin::int(if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    &m * &p
}

/// Torsion invariant factors `> 1` and free rank of `ℤ^rows / im(m)`.
pub fn cokernel(m: &IntMatrix) -> (Vec<BigInt>, usize) {
    let factors = m.invariant_factors();
    let nonzero = factors.iter().filter(|f| !f.is_zero()).count();
    let torsion = factors
        .into_iter()
        .filter(|f| !f.is_zero() && !f.is_one())
        .map(|f| if f < BigInt::zero() { -f } else { f })
        .collect();
    (torsion, m.rows() - nonzero)
}

pub fn cokernel_label(torsion: &[BigInt], free: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    if free > 0 {
        parts.push(if free == 1 { "Z".into() } else { format!("Z^{free}") });
    }
    parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" x ")
    }
}

fn basic_generators(model: &GroupModel) -> Vec<ModelElement> {
    let mut out = Vec::new();
    for j in 0..model.base_dim() {
        let mut v = model.identity().base;
        v[j] = crate::exactlin::int(1);
        out.push(model.base_element(v));
    }
    out.extend((0..model.rank()).map(|i| model.generator(i)));
    out
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Associativity and inverses on random triples.
pub fn group_axioms(model: &GroupModel, seed: u64, count: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let x = model.random_element(&mut rng, 3, 2);
        let y = model.random_element(&mut rng, 3, 2);
        let z = model.random_element(&mut rng, 3, 2);
        let lhs = model.mul(&model.mul(&x, &y), &z);
        let rhs = model.mul(&x, &model.mul(&y, &z));
        if lhs != rhs || model.mul(&x, &model.inv(&x)) != model.identity() {
            return CheckOutcome::new("group_axioms", false, format!("fails on {x}, {y}, {z}"));
        }
    }
    CheckOutcome::new("group_axioms", true, format!("{count} triples"))
}

/// `β(xy) = β(x)β(y)` on random pairs and `β(x) = I ⟺ x ∈ N` on generators
/// and on the relation lattice generators.
pub fn beta_law(model: &GroupModel, heur: &Heuristics, seed: u64, pairs: usize) -> CheckOutcome {
    let run = || -> Result<(bool, String), String> {
        let split = minimal_splitting(model, heur).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pairs {
            let x = model.random_element(&mut rng, 4, 3);
            let y = model.random_element(&mut rng, 4, 3);
            let lhs = beta(&split, &model.mul(&x, &y)).map_err(err)?;
            let rhs = &beta(&split, &x).map_err(err)? * &beta(&split, &y).map_err(err)?;
            if lhs != rhs {
                return Ok((false, format!("not multiplicative on {x}, {y}")));
            }
        }
        let n = &split.nilradical.subgroup;
        let mut elems = basic_generators(model);
        let lam = &split.nilradical.relations.basis;
        for r in 0..lam.rows() {
            let exp = crate::splitting::model::int_row(lam, r);
            elems.push(model.element(model.identity().base, exp));
        }
        for x in &elems {
            let trivial = beta(&split, x).map_err(err)?.is_identity();
            if trivial != n.contains(x) {
                return Ok((false, format!("kernel disagrees with the nilradical at {x}")));
            }
        }
        Ok((true, format!("{pairs} pairs, {} kernel probes", elems.len())))
    };
    CheckOutcome::from_result("beta_law", run())
}

/// For random `x`, a base element `u` conjugating `s(x)` into the family,
/// checked by exact membership.
pub fn conjugacy(model: &GroupModel, heur: &Heuristics, seed: u64, count: usize) -> CheckOutcome {
    let run = || -> Result<(bool, String), String> {
        let split = minimal_splitting(model, heur).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let x = model.random_element(&mut rng, 3, 2);
            let u = crate::splitting::conjugate_commuting_set(model, std::slice::from_ref(&x)).map_err(err)?;
            let sx = semisimple_aut(model, &x).map_err(err)?;
            let iu = model.inner_aut(&u);
            let iu_inv = model.inner_aut(&model.inv(&u));
            let conj = model.aut_compose(&iu, &model.aut_compose(&sx, &iu_inv));
            if !in_c_family(&split, &conj, &x.exponent).map_err(err)? {
                return Ok((false, format!("conjugate of s({x}) is outside the family")));
            }
        }
        Ok((true, format!("{count} elements")))
    };
    CheckOutcome::from_result("conjugacy", run())
}

/// `im((A − I)²) + ker(A_s − I)` is the whole base for every action.
pub fn image_identity(model: &GroupModel) -> CheckOutcome {
    let run = || -> Result<(bool, String), String> {
        for (i, a) in model.actions().iter().enumerate() {
            if !image_identity_holds(a).map_err(err)? {
                return Ok((false, format!("fails for action {i}")));
            }
        }
        Ok((true, format!("{} actions", model.rank())))
    };
    CheckOutcome::from_result("image_identity", run())
}

fn invariants_json(model: &GroupModel, heur: &Heuristics) -> Result<String, HullError> {
    let h = algebraic_hull(model, heur)?;
    Ok(serde_json::to_string(&hull_invariants(&h)).expect("serializable"))
}

/// Invariant reports agree byte for byte across unimodular conjugations
/// and generator permutations.
pub fn presentation_independence(model: &GroupModel, heur: &Heuristics, seed: u64, count: usize) -> CheckOutcome {
    let run = || -> Result<(bool, String), String> {
        let reference = invariants_json(model, heur).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..count {
            let p = random_unimodular(&mut rng, model.base_dim());
            let mut other = model.conjugated(&p).map_err(err)?;
            if model.rank() > 1 {
                let mut perm: Vec<usize> = (0..model.rank()).collect();
                perm.rotate_left(t % model.rank());
                other = other.permuted(&perm).map_err(err)?;
            }
            let report = invariants_json(&other, heur).map_err(err)?;
            if report != reference {
                return Ok((
                    false,
                    format!("conjugation {t} by {p} gives {report}, expected {reference}"),
                ));
            }
        }
        Ok((true, format!("{count} presentations")))
    };
    CheckOutcome::from_result("presentation_independence", run())
}

pub fn hull_checks(model: &GroupModel, heur: &Heuristics, seed: u64) -> Vec<CheckOutcome> {
    let h = match algebraic_hull(model, heur) {
        Ok(h) => h,
        Err(e) => return vec![CheckOutcome::new("hull", false, e.to_string())],
    };
    let v = verify_hull(model, &h, seed);
    let mut out = vec![CheckOutcome::new("verify_hull", v.all_pass(), v.failures.join("; "))];
    out.push(CheckOutcome::from_result(
        "growth_consistency",
        growth_degree_via_matrices(model)
            .map(|d| {
                (
                    d == growth_degree(&h),
                    format!("hull {} vs matrices {d}", growth_degree(&h)),
                )
            })
            .map_err(err),
    ));
    out.push(CheckOutcome::from_result(
        "equivalences",
        check_equivalences(model, &h, heur)
            .map(|_| (true, String::new()))
            .map_err(err),
    ));
    out.push(CheckOutcome::from_result(
        "gan_meets_nilradical",
        g_an(model, &h, heur)
            .map(|d| (d.meets_g_in_nilradical, d.label))
            .map_err(err),
    ));
    let rank_equality = h.dim() == model.base_dim() + model.rank();
    out.push(CheckOutcome::new(
        "rank_equality",
        rank_equality,
        format!("dim {}", h.dim()),
    ));
    out
}

/// Every property check that applies to the model.
pub fn model_checks(model: &GroupModel, heur: &Heuristics, seed: u64) -> Vec<CheckOutcome> {
    let mut out = vec![group_axioms(model, seed, 20), image_identity(model)];
    if !model.has_polynomial_growth() {
        return out;
    }
    out.push(beta_law(model, heur, seed, 100));
    out.push(conjugacy(model, heur, seed, 10));
    out.extend(hull_checks(model, heur, seed));
    out.push(presentation_independence(model, heur, seed, 5));
    out
}

fn golden_specific(heur: &Heuristics) -> Result<Vec<CheckOutcome>, SplittingError> {
    let mut out = Vec::new();
    let alpha = IntMatrix::from_i64(&[&[2, 1], &[2, 0]]);
    let index = alpha.lattice_index();
    out.push(CheckOutcome::new(
        "golden.tensor_lattice.index",
        index == Some(BigInt::from(2)),
        format!("index of im(alpha - I) is {index:?}"),
    ));
    let t = tensor_lattice_model();
    let id = RatMatrix::identity(4);
    let shifted = (&t.actions()[0] - &id).hstack(&(&t.actions()[1] - &id));
    let (torsion, free) = cokernel(&IntMatrix::try_from_rat(&shifted)?);
    out.push(CheckOutcome::new(
        "golden.tensor_lattice.cokernel",
        torsion.iter().any(|d| d % 2 == BigInt::zero()),
        cokernel_label(&torsion, free),
    ));
    let theta = RatMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, -1]]);
    let theta_s = semisimple_factor(&theta)?;
    out.push(CheckOutcome::new(
        "golden.lattice_mixed.semisimple_not_integral",
        !theta_s.is_integral(),
        format!("semisimple part {theta_s}"),
    ));
    let golden = golden_models();
    for g in &golden {
        let outcome = match algebraic_hull(&g.model, heur) {
            Ok(h) => {
                let r = hull_invariants(&h);
                let expected = match g.name {
                    "cos35" => Some((3, vec![3], 3, 1, 1, 1)),
                    "shear" => Some((3, vec![2, 1], 4, 0, 1, 3)),
                    "rot90" => Some((3, vec![3], 3, 0, 4, 1)),
                    "redundant_power" => Some((4, vec![4], 4, 1, 1, 2)),
                    _ => None,
                };
                let got = (
                    r.nilshadow_dim,
                    r.lcs_dims.clone(),
                    r.guivarch_degree,
                    r.torus_rank,
                    r.finite_component_order,
                    r.m_tilde_dim,
                );
                match expected {
                    Some(e) => CheckOutcome::new(format!("golden.{}.invariants", g.name), got == e, format!("{got:?}")),
                    None => CheckOutcome::new(format!("golden.{}.invariants", g.name), true, format!("{got:?}")),
                }
            }
            Err(e) => CheckOutcome::new(format!("golden.{}.invariants", g.name), false, e.to_string()),
        };
        out.push(outcome);
    }
    Ok(out)
}

/// The reference corpus: specific values plus every model check on each
/// golden model.
pub fn golden_corpus(heur: &Heuristics, seed: u64) -> Vec<CheckOutcome> {
    let mut out = match golden_specific(heur) {
        Ok(v) => v,
        Err(e) => vec![CheckOutcome::new("golden", false, e.to_string())],
    };
    for g in golden_models() {
        for c in model_checks(&g.model, heur, seed) {
            out.push(CheckOutcome {
                name: format!("golden.{}.{}", g.name, c.name),
                ..c
            });
        }
    }
    out
}
