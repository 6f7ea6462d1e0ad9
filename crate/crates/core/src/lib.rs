//! Exact computations for polynomial-growth group models `B ⋊ ℤ^k`:
//! Jordan–Chevalley decompositions, semisimple parts of inner
//! automorphisms, nilradicals, minimal splittings, nil-shadows and
//! algebraic hulls.

pub mod cli;
pub mod exactlin;
pub mod hull;
pub mod nilpotent;
pub mod splitting;
