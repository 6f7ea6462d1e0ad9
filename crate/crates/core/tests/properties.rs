//! Randomized invariants across the exact linear algebra, nilpotent and
//! hull layers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use nilshadow::exactlin::{
    int, is_semisimple, jordan_chevalley_additive, jordan_chevalley_multiplicative, nilpotent_exp, nilpotent_log, rat,
    IntMatrix, Rat, RatMatrix,
};
use nilshadow::hull::{algebraic_hull, golden_models, growth_degree, hull_invariants};
use nilshadow::nilpotent::{bch_product, malcev_completion, NilLieAlgebra};
use nilshadow::splitting::{beta, minimal_splitting, nilshadow_model, GroupModel, Heuristics, ModelElement};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn square(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(small_rat(), n * n).prop_map(move |d| RatMatrix::from_vec(n, n, d))
    })
}

/// Upper triangular matrices whose diagonal takes at most two values, so
/// that nontrivial nilpotent parts are common.
fn repeated_spectrum(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        (
            small_rat(),
            small_rat(),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(small_rat(), n * n),
        )
            .prop_map(move |(a, b, pick, upper)| {
                let mut m = RatMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = if pick[i] { a.clone() } else { b.clone() };
                    for j in i + 1..n {
                        m[(i, j)] = upper[i * n + j].clone();
                    }
                }
                m
            })
    })
}

fn strictly_upper(max_dim: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(small_rat(), n * n).prop_map(move |d| {
            let mut m = RatMatrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    m[(i, j)] = d[i * n + j].clone();
                }
            }
            m
        })
    })
}

fn int_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-9i64..=9, r * c).prop_map(move |d| {
            let rows: Vec<Vec<i64>> = d.chunks(c).map(|ch| ch.to_vec()).collect();
            IntMatrix::from_vec_rows(&rows, c)
        })
    })
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec(small_rat(), n)
}

fn is_diagonal_chain(s: &IntMatrix) -> bool {
    let mut diag = Vec::new();
    for i in 0..s.rows() {
        for (j, x) in s.row(i).iter().enumerate() {
            if i != j && !x.is_zero() {
                return false;
            }
        }
        if i < s.cols() {
            diag.push(s.row(i)[i].clone());
        }
    }
    diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            (&w[1] % &w[0]).is_zero()
        }
    })
}

fn has_unit_det(m: &IntMatrix) -> bool {
    m.det().map(|d| d.abs().is_one()).unwrap_or(false)
}

fn int_product(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    IntMatrix::try_from_rat(&(&a.to_rat() * &b.to_rat())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additive_decomposition_is_polynomial_and_commuting(m in square(4)) {
        let jc = jordan_chevalley_additive(&m).unwrap();
        prop_assert_eq!(&(&jc.semisimple + &jc.nilpotent), &m);
        prop_assert!(jc.semisimple.commutes_with(&jc.nilpotent));
        prop_assert!(jc.nilpotent.is_nilpotent());
        prop_assert!(is_semisimple(&jc.semisimple));
        prop_assert_eq!(jc.poly.eval_matrix(&m), jc.semisimple);
    }

    #[test]
    fn multiplicative_decomposition_on_repeated_spectra(m in repeated_spectrum(5)) {
        prop_assume!(m.is_invertible());
        let jc = jordan_chevalley_multiplicative(&m).unwrap();
        prop_assert_eq!(&(&jc.semisimple * &jc.unipotent), &m);
        prop_assert!(jc.semisimple.commutes_with(&jc.unipotent));
        prop_assert!(jc.unipotent.is_unipotent());
        prop_assert!(is_semisimple(&jc.semisimple));
        // decomposing the semisimple part again changes nothing
        let again = jordan_chevalley_multiplicative(&jc.semisimple).unwrap();
        prop_assert!(again.unipotent.is_identity());
    }

    #[test]
    fn exp_and_log_are_inverse(n in strictly_upper(5)) {
        let u = nilpotent_exp(&n).unwrap();
        prop_assert!(u.is_unipotent());
        prop_assert_eq!(nilpotent_log(&u).unwrap(), n);
    }

    #[test]
    fn smith_form_is_a_divisor_chain(m in int_matrix()) {
        let (s, u, v) = m.smith_normal_form();
        prop_assert!(has_unit_det(&u) && has_unit_det(&v));
        prop_assert_eq!(int_product(&int_product(&u, &m), &v), s.clone());
        prop_assert!(is_diagonal_chain(&s));
    }

    #[test]
    fn hermite_form_spans_the_same_lattice(m in int_matrix()) {
        let (h, u) = m.hermite_normal_form();
        prop_assert!(has_unit_det(&u));
        prop_assert_eq!(int_product(&u, &m), h.clone());
        let mut last_pivot: Option<usize> = None;
        for i in 0..h.rows() {
            let row = h.row(i);
            match row.iter().position(|x| !x.is_zero()) {
                Some(p) => {
                    prop_assert!(row[p] > BigInt::zero());
                    prop_assert!(last_pivot.map_or(true, |q| p > q));
                    for k in 0..i {
                        let above = &h.row(k)[p];
                        prop_assert!(*above >= BigInt::zero() && *above < row[p]);
                    }
                    last_pivot = Some(p);
                }
                None => prop_assert!((i..h.rows()).all(|k| h.is_zero_row(k))),
            }
        }
    }

    #[test]
    fn bch_is_associative_with_inverses(x in vector(4), y in vector(4), z in vector(4)) {
        let alg = NilLieAlgebra::filiform4();
        let lhs = bch_product(&alg, &bch_product(&alg, &x, &y), &z);
        let rhs = bch_product(&alg, &x, &bch_product(&alg, &y, &z));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(alg.mul(&x, &alg.inv(&x)).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn heisenberg_commutator_is_central(x in vector(3), y in vector(3)) {
        let alg = NilLieAlgebra::heisenberg();
        let xy = alg.mul(&x, &y);
        let yx = alg.mul(&y, &x);
        let comm = alg.mul(&xy, &alg.inv(&yx));
        prop_assert!(comm[0].is_zero() && comm[1].is_zero());
        prop_assert_eq!(&comm, &alg.bracket(&x, &y));
    }

    #[test]
    fn beta_is_multiplicative(which in 0usize..7, seed in any::<u64>()) {
        use rand::SeedableRng;
        let g = &golden_models()[which];
        let split = minimal_splitting(&g.model, &Heuristics::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = g.model.random_element(&mut rng, 5, 3);
        let y = g.model.random_element(&mut rng, 5, 3);
        let lhs = beta(&split, &g.model.mul(&x, &y)).unwrap();
        let rhs = &beta(&split, &x).unwrap() * &beta(&split, &y).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn embedded_commutators_land_in_the_nilradical(which in 0usize..7, seed in any::<u64>()) {
        use rand::SeedableRng;
        let g = &golden_models()[which];
        let heur = Heuristics::default();
        let hull = algebraic_hull(&g.model, &heur).unwrap();
        let split = minimal_splitting(&g.model, &heur).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = g.model.random_element(&mut rng, 4, 3);
        let y = g.model.random_element(&mut rng, 4, 3);
        let c = g.model.commutator(&x, &y);
        let e = hull.embed(&c);
        prop_assert!(e.k_word.iter().all(|&w| w == 0));
        prop_assert!(beta(&split, &c).unwrap().is_identity());
        // the embedding is a homomorphism on this pair
        prop_assert_eq!(hull.embed(&g.model.mul(&x, &y)), hull.mul(&hull.embed(&x), &hull.embed(&y)));
    }
}

/// Affine `(n+1)`-matrices of the basis translations and of the actions.
fn affine_generators(model: &GroupModel) -> Vec<RatMatrix> {
    let n = model.base_dim();
    let mut out = Vec::new();
    for j in 0..n {
        let mut t = RatMatrix::identity(n + 1);
        t[(j, n)] = int(1);
        out.push(t);
    }
    for a in model.actions() {
        out.push(a.block_diag(&RatMatrix::identity(1)));
    }
    out
}

#[test]
fn hull_of_a_nilpotent_model_is_its_malcev_completion() {
    let jordan3 = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
    let models = [
        GroupModel::lattice(2, vec![RatMatrix::from_i64(&[&[1, 1], &[0, 1]])]).unwrap(),
        GroupModel::lattice(3, vec![jordan3.clone()]).unwrap(),
        GroupModel::real(3, vec![jordan3]).unwrap(),
        GroupModel::real(3, vec![]).unwrap(),
    ];
    let heur = Heuristics::default();
    for model in &models {
        let hull = algebraic_hull(model, &heur).unwrap();
        assert!(hull.compact_part.is_trivial(), "{}", model.label());
        assert!(hull.action_of_k.iter().all(|k| k.is_identity()));
        let malcev = malcev_completion(&affine_generators(model)).unwrap();
        assert_eq!(malcev.algebra.dim(), hull.dim(), "{}", model.label());
        assert_eq!(
            malcev.algebra.series().quotient_dims(),
            hull.nilshadow.series().quotient_dims()
        );
        assert_eq!(malcev.algebra.guivarch_degree(), growth_degree(&hull));
        let r = hull_invariants(&hull);
        assert_eq!((r.torus_rank, r.finite_component_order), (0, 1));
        assert_eq!(r.m_tilde_dim, hull.dim());
        // the nil-shadow of a nilpotent model is the model itself
        assert_eq!(nilshadow_model(model).unwrap().model.actions(), model.actions());
    }
}

#[test]
fn group_law_of_golden_models_is_associative() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for g in golden_models() {
        for _ in 0..10 {
            let xs: Vec<ModelElement> = (0..3).map(|_| g.model.random_element(&mut rng, 3, 2)).collect();
            let lhs = g.model.mul(&g.model.mul(&xs[0], &xs[1]), &xs[2]);
            let rhs = g.model.mul(&xs[0], &g.model.mul(&xs[1], &xs[2]));
            assert_eq!(lhs, rhs, "{}", g.name);
        }
    }
}
