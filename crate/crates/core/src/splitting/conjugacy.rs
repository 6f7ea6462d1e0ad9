//! Conjugating elements into fixed groups of semisimple automorphisms.
//!
//! For `σ = (S, 0)` with `S` semisimple, `y = (w, m)` lies in `G_σ` iff
//! `P w = 0`, where `P` projects onto `im(S − I)` along `ker(S − I)`.
//! Conjugating by `u` in a layer `γ_j` of the lower central series changes
//! `w` by `(I − A^m) u` modulo `γ_{j+1}`, so a solution is built one layer
//! at a time from linear systems. On `im(S − I)` the map `I − A^m` is
//! invertible whenever `S` is the semisimple part of `A^m`, which is what
//! makes each system solvable.

use num_traits::Zero;

use crate::exactlin::{Rat, RatMatrix};

use super::model::{GroupModel, ModelAut, ModelElement};
use super::SplittingError;

/// Projection onto `im(S − I)` along `ker(S − I)`.
pub fn moving_projection(s: &RatMatrix) -> Result<RatMatrix, SplittingError> {
    let n = s.rows();
    let d = s - &RatMatrix::identity(n);
    let ker = d.kernel();
    let im = d.image();
    if ker.cols() + im.cols() != n {
        return Err(SplittingError::NotAnAutomorphism(
            "eigenvalue 1 is not semisimple".into(),
        ));
    }
    let q = ker.hstack(&im);
    let mut diag = vec![Rat::zero(); n];
    for v in diag.iter_mut().skip(ker.cols()) {
        *v = Rat::from_integer(1.into());
    }
    Ok(&(&q * &RatMatrix::diagonal(&diag)) * &q.inverse()?)
}

struct Target {
    p: RatMatrix,
    shift: RatMatrix,
}

fn check_sigma(model: &GroupModel, s: &RatMatrix) -> Result<(), SplittingError> {
    if s.rows() != model.base_dim() || !s.is_square() {
        return Err(SplittingError::Shape("automorphism has the wrong size".into()));
    }
    if !model.algebra().is_automorphism(s)? {
        return Err(SplittingError::NotAnAutomorphism(
            "matrix does not preserve the bracket".into(),
        ));
    }
    if model.actions().iter().any(|a| !a.commutes_with(s)) {
        return Err(SplittingError::NotAnAutomorphism(
            "matrix does not commute with the actions".into(),
        ));
    }
    Ok(())
}

/// One base element `u` with `u x_t u⁻¹ ∈ G_{σ_t}` for all targets.
fn solve_layers(model: &GroupModel, targets: &[(ModelElement, RatMatrix)]) -> Result<ModelElement, SplittingError> {
    let n = model.base_dim();
    let alg = model.algebra();
    let mut prepared = Vec::with_capacity(targets.len());
    for (x, s) in targets {
        check_sigma(model, s)?;
        let p = moving_projection(s)?;
        let shift = &p * &(&RatMatrix::identity(n) - &model.action_power(&x.exponent));
        prepared.push(Target { p, shift });
    }
    let mut ys: Vec<ModelElement> = targets.iter().map(|(x, _)| x.clone()).collect();
    let mut total = vec![Rat::zero(); n];
    let layers = &alg.series().layers;
    for j in 0..layers.len().saturating_sub(1) {
        let here = &layers[j];
        let next = &layers[j + 1];
        if here.cols() == 0 {
            break;
        }
        let t = prepared.len();
        let unknowns = here.cols() + t * next.cols();
        let mut system = RatMatrix::zeros(t * n, unknowns);
        let mut rhs = vec![Rat::zero(); t * n];
        for (ti, (tg, y)) in prepared.iter().zip(&ys).enumerate() {
            let a = &tg.shift * here;
            let pw = tg.p.apply(&y.base);
            for r in 0..n {
                for c in 0..here.cols() {
                    system[(ti * n + r, c)] = a[(r, c)].clone();
                }
                for c in 0..next.cols() {
                    system[(ti * n + r, here.cols() + ti * next.cols() + c)] = -next[(r, c)].clone();
                }
                rhs[ti * n + r] = -pw[r].clone();
            }
        }
        let sol = system.solve(&rhs).ok_or_else(|| {
            SplittingError::NoSolution(format!("no conjugator in layer {} of the lower central series", j + 1))
        })?;
        let u = here.apply(&sol[..here.cols()]);
        if u.iter().all(|v| v.is_zero()) {
            continue;
        }
        let g = model.base_element(u.clone());
        ys = ys.iter().map(|y| model.conj(&g, y)).collect();
        total = alg.mul(&u, &total);
    }
    for (tg, y) in prepared.iter().zip(&ys) {
        if tg.p.apply(&y.base).iter().any(|v| !v.is_zero()) {
            return Err(SplittingError::NoSolution("conjugate is not fixed".into()));
        }
    }
    Ok(model.base_element(total))
}

/// Base element `u` with `u x u⁻¹` fixed by `(σ, 0)`. Requires `σ` to be a
/// semisimple automorphism commuting with the actions such that
/// `σ⁻¹ ∘ ι_x` is unipotent.
pub fn conjugate_to_fixed(
    model: &GroupModel,
    x: &ModelElement,
    sigma: &RatMatrix,
) -> Result<ModelElement, SplittingError> {
    solve_layers(model, &[(x.clone(), sigma.clone())])
}

/// The semisimple part `s(ι_x)` as a model automorphism: with `u` from
/// [`conjugate_to_fixed`] for `σ = (A^m)_s`, it is `ι_u⁻¹ ∘ σ ∘ ι_u`.
pub fn semisimple_aut(model: &GroupModel, x: &ModelElement) -> Result<ModelAut, SplittingError> {
    let s = model.semisimple_power(&x.exponent);
    let u = conjugate_to_fixed(model, x, &s)?;
    let sigma = ModelAut::linear(s, model.rank());
    let inner = model.inner_aut(&u);
    let inner_inv = model.inner_aut(&model.inv(&u));
    Ok(model.aut_compose(&inner_inv, &model.aut_compose(&sigma, &inner)))
}

/// One base element `u` conjugating every `s(x)`, `x ∈ xs`, into the
/// family `{((A^m)_s, 0)}`: afterwards `ι_u s(x) ι_u⁻¹ = ((A^{m_x})_s, 0)`,
/// which is verified exactly. The semisimple parts must commute pairwise.
pub fn conjugate_commuting_set(model: &GroupModel, xs: &[ModelElement]) -> Result<ModelElement, SplittingError> {
    let targets: Vec<(ModelElement, RatMatrix)> = xs
        .iter()
        .map(|x| (x.clone(), model.semisimple_power(&x.exponent)))
        .collect();
    let u = solve_layers(model, &targets)?;
    let iu = model.inner_aut(&u);
    let iu_inv = model.inner_aut(&model.inv(&u));
    for (x, s) in xs.iter().zip(targets.iter().map(|t| &t.1)) {
        let sx = semisimple_aut(model, x)?;
        let conj = model.aut_compose(&iu, &model.aut_compose(&sx, &iu_inv));
        if conj != ModelAut::linear(s.clone(), model.rank()) {
            return Err(SplittingError::NoSolution(format!(
                "conjugated semisimple part of {x} is not in the family"
            )));
        }
    }
    Ok(u)
}
