//! Glue from a molecule to MO integrals and reference amplitudes.

use std::time::Instant;

use crate::molint::{compute_ao_integrals, AOBundle, BasisName, Molecule};
use crate::scf::{ao_to_mo, ccsd_solve, mp2_amplitudes, run_rhf, Amplitudes, CcsdOptions, CcsdResult, MOIntegrals, RHFResult, RhfOptions};
use crate::Result;

/// A closed-shell molecule in the canonical RHF orbital basis.
#[derive(Clone, Debug)]
pub struct Problem {
    pub molecule: Molecule,
    pub basis: BasisName,
    pub ao: AOBundle,
    pub rhf: RHFResult,
    pub mo: MOIntegrals,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Seconds spent on integrals plus RHF.
    pub t_int_s: f64,
}

impl Problem {
    pub fn new(molecule: Molecule, basis: BasisName) -> Result<Self> {
        let t0 = Instant::now();
        let ao = compute_ao_integrals(&molecule, basis)?;
        let rhf = run_rhf(&ao, molecule.n_electrons(), &RhfOptions::default())?;
        let mo = ao_to_mo(&ao, &rhf.mo_coeffs)?;
        let n = rhf.n_occ;
        Ok(Self {
            molecule,
            basis,
            ao,
            rhf,
            mo,
            n_alpha: n,
            n_beta: n,
            t_int_s: t0.elapsed().as_secs_f64(),
        })
    }

    pub fn n_orb(&self) -> usize {
        self.mo.n_orb
    }

    pub fn eps(&self) -> &[f64] {
        self.rhf.orbital_energies.as_slice()
    }

    pub fn ccsd(&self) -> Result<CcsdResult> {
        ccsd_solve(&self.mo, self.eps(), self.rhf.n_occ, &CcsdOptions::default())
    }

    pub fn mp2(&self) -> Result<(Amplitudes, f64)> {
        mp2_amplitudes(&self.mo, self.eps(), self.rhf.n_occ)
    }
}
