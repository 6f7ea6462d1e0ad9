//! Reference models used by the test suites and the `suite` command.

use crate::exactlin::{int, rat, RatMatrix};
use crate::nilpotent::NilLieAlgebra;
use crate::splitting::GroupModel;

#[derive(Clone, Debug)]
pub struct GoldenModel {
    pub name: &'static str,
    pub model: GroupModel,
}

fn cos35() -> RatMatrix {
    RatMatrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(6, 5)]]).expect("square")
}

/// Polynomial-growth models covering real, lattice and nilpotent bases,
/// finite and torus compact parts, unipotent and mixed actions.
pub fn golden_models() -> Vec<GoldenModel> {
    let rot90 = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
    let shear = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    let a = cos35();
    let jordan_block = {
        let z = RatMatrix::zeros(2, 2);
        a.hstack(&RatMatrix::identity(2)).vstack(&z.hstack(&a))
    };
    let theta = RatMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, -1]]);
    GoldenModel::list(vec![
        ("cos35", GroupModel::real(2, vec![a.clone()])),
        ("rot90", GroupModel::lattice(2, vec![rot90])),
        ("shear", GroupModel::lattice(2, vec![shear])),
        ("rotation_jordan_block", GroupModel::real(4, vec![jordan_block])),
        (
            "heisenberg_rotation",
            GroupModel::nil(
                NilLieAlgebra::heisenberg(),
                false,
                vec![a.block_diag(&RatMatrix::identity(1))],
            ),
        ),
        ("lattice_mixed", GroupModel::lattice(3, vec![theta])),
        ("redundant_power", GroupModel::real(2, vec![a.clone(), a.pow_u(2)])),
    ])
}

impl GoldenModel {
    fn list(items: Vec<(&'static str, Result<GroupModel, crate::splitting::SplittingError>)>) -> Vec<GoldenModel> {
        items
            .into_iter()
            .map(|(name, m)| GoldenModel {
                name,
                model: m.unwrap_or_else(|e| panic!("golden model {name}: {e}")),
            })
            .collect()
    }
}

/// `ℤ⁴ ⋊ ℤ²` acting by `α ⊗ I` and `I ⊗ α` with `α = [[3,1],[2,1]]`: an
/// exponential-growth lattice group used for normal-form computations.
pub fn tensor_lattice_model() -> GroupModel {
    let alpha = RatMatrix::from_i64(&[&[3, 1], &[2, 1]]);
    let id = RatMatrix::identity(2);
    GroupModel::lattice(4, vec![alpha.kron(&id), id.kron(&alpha)]).expect("commuting unimodular actions")
}
