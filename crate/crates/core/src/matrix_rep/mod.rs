//! Numerical realization of operator expressions on a truncated
//! spinor ⊗ oscillator basis, identity checks and wavepacket evolution.

mod basis;
mod evolve;
mod realize;
mod sparse;

pub use basis::{ConstantValues, FockBasisConfig};
pub use evolve::{
    convergence, ehrenfest_residual, evolve, gaussian_packet, ConvergenceCheck, EhrenfestSeries, SpectralDecomposition,
    StateVector, Trajectory,
};
pub use realize::{dirac_alpha, dirac_beta, hermiticity_residual, identity_residual, realize, Realizer, ResidualReport};
pub use sparse::CsrMatrix;
