//! Exact linear algebra over ℤ.
//!
//! Everything downstream (cocycle tests, cohomology, witnesses, lifts)
//! reduces to Smith normal forms and integer linear systems computed here.

mod group;
mod matrix;
mod smith;
mod solve;

use thiserror::Error;

pub use group::{
    analyze_morphism, element_equal, FGAbelianGroup, GroupElement, GroupMorphism, Invariants, MorphismAnalysis,
};
pub(crate) use group::express_in;
pub use matrix::{int_vec, IntMatrix};
pub use smith::{hermite_rows, smith_normal_form, SnfDecomposition};
pub use solve::{
    integer_kernel, solve_linear, solve_or_certify, IntegerInfeasibility, Solvability, MIN_NORM_SEARCH_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("morphism matrix is {rows}x{cols} but source has {source_gens} and target {target_gens} generators")]
    MorphismShape {
        rows: usize,
        cols: usize,
        source_gens: usize,
        target_gens: usize,
    },
    #[error("morphism does not respect source relation {relation}")]
    IllDefinedMorphism { relation: usize },
}
