//! Mean-field and correlated references: RHF, AO to MO transforms, MP2,
//! CCSD and the cluster-amplitude exchange format.

pub mod amplitudes;
pub mod ccsd;
mod mo;
pub mod mp2;
pub mod rhf;

pub use amplitudes::{AmplitudeSource, Amplitudes};
pub use ccsd::{ccsd_solve, CcsdOptions, CcsdResult, SpinAmplitudes, SpinHamiltonian};
pub use mo::{ao_to_mo, transform_eri, MOIntegrals};
pub use mp2::mp2_amplitudes;
pub use rhf::{coulomb_exchange, run_rhf, run_rhf_orthonormal, RHFResult, RhfOptions};
