//! Determinant spaces, Slater–Condon Hamiltonians, the Davidson eigensolver,
//! reduced density matrices and FCI.
//!
//! Qubit k of a measurement string is spin orbital k: α orbital p is qubit
//! p and β orbital p is qubit n_orb + p. Operator strings use this
//! Jordan–Wigner order, which fixes every fermionic sign in the module.

pub mod davidson;
pub mod det;
pub mod fci;
pub mod hamiltonian;
pub mod rdm;
pub mod space;

pub use davidson::{davidson_lowest, DavidsonOptions, SymmetricOperator};
pub use det::Determinant;
pub use fci::{fci_ground_state, solve_in_space, SpectralResult};
pub use hamiltonian::{build_subspace_hamiltonian, SlaterCondon, SparseMatrix};
pub use rdm::{compute_rdms, spin_square, transition_rdms, Rdms};
pub use space::{binomial, combinations, enumerate_symmetry_space, DetSpace};
