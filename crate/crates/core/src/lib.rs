//! Symbolic derivation and numerical cross-checking of Heisenberg equations
//! of motion for a Dirac particle in noncommutative phase space.

// links the system BLAS/LAPACK used by the eigensolver
extern crate openblas_src;

pub mod cli_reports;
pub mod dirac_model;
pub mod error;
pub mod heisenberg;
pub mod matrix_rep;
pub mod nc_algebra;
pub mod operator_ir;

pub use error::{Error, Result};
