//! Molecular geometry, Gaussian basis sets, analytic s/p integrals and
//! integral file formats.

pub mod basis;
pub mod boys;
pub mod bundle;
pub mod eri;
pub mod fcidump;
pub mod geometry;
mod hermite;
pub mod integrals;

pub use basis::{BasisName, BasisShell};
pub use bundle::AOBundle;
pub use eri::PackedEri;
pub use geometry::{parse_geometry, Atom, LengthUnit, Molecule, ANGSTROM_TO_BOHR};
pub use integrals::{compute_ao_integrals, overlap_between};
