//! Commutative and deformed Dirac Hamiltonians.

mod field;
mod hamiltonian;

pub use field::{unit, FieldSpec};
pub use hamiltonian::{
    commutative_hamiltonian, commutative_hamiltonian_symbolic, coupling_gradient, deformed_hamiltonian,
    eta_structure, field_context, space_deformation, space_deformed_hamiltonian, theta_structure,
    vector_potential_atoms, CoefficientNote, HamiltonianBundle, HamiltonianPiece,
};
