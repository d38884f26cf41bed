use nalgebra::DMatrix;

use super::davidson::{davidson_lowest, DavidsonOptions};
use super::hamiltonian::build_subspace_hamiltonian;
use super::rdm::{compute_rdms, spin_square};
use super::space::{enumerate_symmetry_space, DetSpace};
use crate::scf::MOIntegrals;
use crate::Result;

/// Lowest eigenpair of H restricted to a determinant space with its
/// one-body diagnostics.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Electronic eigenvalue (no core energy).
    pub e0: f64,
    /// e0 + e_core.
    pub e_total: f64,
    pub ground_vector: Vec<f64>,
    pub n_davidson_cycles: usize,
    /// Spin-summed one-body density.
    pub rdm1: DMatrix<f64>,
    /// [α_0..α_{n−1}, β_0..β_{n−1}].
    pub avg_occupancy: Vec<f64>,
    pub s2: f64,
}

/// Diagonalize H in `space` (Slater–Condon assembly plus Davidson).
pub fn solve_in_space(space: &DetSpace, mo: &MOIntegrals, opts: &DavidsonOptions) -> Result<SpectralResult> {
    let h = build_subspace_hamiltonian(space, mo)?;
    let (e0, v, cycles) = davidson_lowest(&h, opts)?;
    let rdms = compute_rdms(&v, space, false);
    Ok(SpectralResult {
        e0,
        e_total: e0 + mo.e_core,
        rdm1: rdms.dm1(),
        avg_occupancy: rdms.avg_occupancy(),
        s2: spin_square(&v, space),
        ground_vector: v,
        n_davidson_cycles: cycles,
    })
}

/// Full CI in the (N_α, N_β) sector.
pub fn fci_ground_state(mo: &MOIntegrals, n_alpha: usize, n_beta: usize, opts: &DavidsonOptions) -> Result<(DetSpace, SpectralResult)> {
    let space = enumerate_symmetry_space(mo.n_orb, n_alpha, n_beta)?;
    let r = solve_in_space(&space, mo, opts)?;
    Ok((space, r))
}
