//! Statevector simulation of the sample-generating circuits, shot sampling
//! with optional noise, and logical resource estimates.
//!
//! Register layout follows the Jordan–Wigner order of [`crate::detspace`]:
//! α orbital p is qubit p and β orbital p is qubit n_orb + p.

pub mod gates;
pub mod lucj;
pub mod qeb;
pub mod resources;
pub mod rotation;
pub mod sampling;
pub mod state;

pub use gates::{apply_gate, Circuit, Gate};
pub use lucj::{lucj_circuit, lucj_params_from_t2, prepare_lucj_state, Connectivity, LucjLayer, LucjParams};
pub use qeb::{prepare_lcnot_uccsd_state, qeb_circuit, qeb_excitations, qeb_params_from_amplitudes, QebDouble, QebParams, QebSingle};
pub use resources::{estimate_resources, ResourceReport};
pub use sampling::{sample_circuit, sample_counts, Counts, NoiseModel};
pub use state::{Statevector, C64, MAX_QUBITS};
