//! Desk-scale workbench for sample-based quantum diagonalization.
//!
//! The crate is organised bottom-up:
//!
//! - [`molint`]: geometries, Gaussian basis data, s/p integrals, FCIDUMP.
//! - [`scf`]: RHF, AO to MO transforms, MP2 and CCSD.
//! - [`detspace`]: determinant spaces, Slater–Condon Hamiltonians, Davidson, RDMs, FCI.
//! - [`qsim`]: statevector simulation of LUCJ and QEB circuits, sampling, resources.
//! - [`sqd`]: configuration recovery, subsampling and the SQD loop.
//! - [`dmet`]: one-shot DMET with pluggable impurity solvers.
//! - [`scan`]: potential-energy-surface grids, resumable CSV scans and reports.
//!
//! Data-parallel kernels go through [`par`], which uses rayon when the
//! `parallel` feature is on and plain iterators otherwise.

pub mod detspace;
pub mod dmet;
pub mod error;
pub mod linalg;
pub mod molint;
pub mod par;
pub mod pipeline;
pub mod qsim;
pub mod scan;
pub mod scf;
pub mod seeds;
pub mod sqd;
pub mod systems;

pub use error::{Error, Result};
