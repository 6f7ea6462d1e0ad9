//! Exact linear algebra over ℚ and ℤ.

pub mod intmatrix;
pub mod jordan;
pub mod lll;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod rat;
pub mod spectrum;

pub use intmatrix::IntMatrix;
pub use jordan::{
    charpoly, is_semisimple, is_unipotent, jordan_chevalley_additive, jordan_chevalley_multiplicative, minimal_poly,
    nilpotent_exp, nilpotent_log, semisimple_factor, unipotent_factor, AdditiveJordan, MultiplicativeJordan,
};
pub use matrix::RatMatrix;
pub use poly::Poly;
pub use rat::{fmt_rat, int, parse_rat, rat, Rat};
pub use spectrum::{spectrum_certificate, SpectrumCertificate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinAlgError {
    #[error("rows of unequal length")]
    Ragged,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix has non-integer entries")]
    NotIntegral,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
