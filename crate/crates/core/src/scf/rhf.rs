use nalgebra::{DMatrix, DVector};

use crate::linalg::{eigh, inv_sqrt, max_abs, Diis};
use crate::molint::eri::PackedEri;
use crate::molint::AOBundle;
use crate::par;
use crate::scf::MOIntegrals;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RhfOptions {
    pub max_iter: usize,
    /// Threshold on max |FDS − SDF|.
    pub conv_tol: f64,
    /// Virtual-space level shift (Hartree) used for the first
    /// `level_shift_iters` iterations.
    pub level_shift: f64,
    pub level_shift_iters: usize,
    pub diis_depth: usize,
}

impl Default for RhfOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            conv_tol: 1e-9,
            level_shift: 0.2,
            level_shift_iters: 3,
            diis_depth: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RHFResult {
    /// n_ao × n_orb, columns S-orthonormal.
    pub mo_coeffs: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    /// Includes nuclear repulsion.
    pub e_total: f64,
    pub density: DMatrix<f64>,
    pub n_occ: usize,
    pub converged: bool,
    pub n_iterations: usize,
    /// Energy after every iteration.
    pub energy_trace: Vec<f64>,
}

/// Coulomb and exchange matrices J[D], K[D] from packed integrals.
pub fn coulomb_exchange(eri: &PackedEri, d: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = eri.n;
    let npair = n * (n + 1) / 2;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let n_chunks = npair.clamp(1, 64);
    let chunk = npair.div_ceil(n_chunks);
    let parts = par::map_range(n_chunks, |c| {
        let mut jm = DMatrix::<f64>::zeros(n, n);
        let mut km = DMatrix::<f64>::zeros(n, n);
        let lo = c * chunk;
        let hi = ((c + 1) * chunk).min(npair);
        for ij in lo..hi {
            let (i, j) = pairs[ij];
            let base = ij * (ij + 1) / 2;
            for (kl, &(k, l)) in pairs.iter().enumerate().take(ij + 1) {
                let v = eri.data[base + kl];
                if v == 0.0 {
                    continue;
                }
                let mut f = v;
                if i == j {
                    f *= 0.5;
                }
                if k == l {
                    f *= 0.5;
                }
                if ij == kl {
                    f *= 0.5;
                }
                for (p, q, r, s) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    jm[(p, q)] += f * d[(r, s)];
                    km[(p, r)] += f * d[(q, s)];
                }
            }
        }
        (jm, km)
    });
    let mut jm = DMatrix::zeros(n, n);
    let mut km = DMatrix::zeros(n, n);
    for (a, b) in parts {
        jm += a;
        km += b;
    }
    (jm, km)
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let co = c.columns(0, n_occ);
    co * co.transpose() * 2.0
}

/// Closed-shell Roothaan SCF with DIIS and an initial level shift.
pub fn run_rhf(ao: &AOBundle, n_electrons: usize, opts: &RhfOptions) -> Result<RHFResult> {
    if n_electrons % 2 != 0 {
        return Err(Error::Invalid(format!("RHF needs an even electron count, got {n_electrons}")));
    }
    let n = ao.n_ao;
    if n_electrons > 2 * n {
        return Err(Error::Invalid("more electrons than spin orbitals".into()));
    }
    let n_occ = n_electrons / 2;
    let x = inv_sqrt(&ao.s, 1e-10)
        .map_err(|e| Error::Invalid(format!("singular overlap: {e}")))?;
    let xt = x.transpose();
    let solve = |f: &DMatrix<f64>| {
        let fp = &xt * f * &x;
        let (w, v) = eigh(&fp);
        (w, &x * v)
    };
    let (_, mut c) = solve(&ao.hcore);
    let mut d = density(&c, n_occ);
    let mut diis = Diis::new(opts.diis_depth);
    let mut trace = Vec::new();
    let mut last_e = f64::NAN;
    for it in 0..opts.max_iter {
        let (jm, km) = coulomb_exchange(&ao.eri, &d);
        let f = &ao.hcore + jm - km * 0.5;
        let e = 0.5 * (&d * (&ao.hcore + &f)).trace() + ao.e_nuc;
        trace.push(e);
        last_e = e;
        let err = &f * &d * &ao.s - &ao.s * &d * &f;
        let err_max = max_abs(&err);
        if err_max < opts.conv_tol && it > 0 {
            let (w, cf) = solve(&f);
            return Ok(RHFResult {
                density: density(&cf, n_occ),
                mo_coeffs: cf,
                orbital_energies: w,
                e_total: e,
                n_occ,
                converged: true,
                n_iterations: it + 1,
                energy_trace: trace,
            });
        }
        let err_o = &xt * &err * &x;
        let fx = diis.extrapolate(f.as_slice().to_vec(), err_o.as_slice().to_vec());
        let mut fd = DMatrix::from_column_slice(n, n, &fx);
        if it < opts.level_shift_iters && opts.level_shift != 0.0 {
            fd += (&ao.s - &ao.s * &d * &ao.s * 0.5) * opts.level_shift;
        }
        let (_, cn) = solve(&fd);
        c = cn;
        d = density(&c, n_occ);
    }
    Err(Error::NotConverged {
        method: "RHF",
        iterations: opts.max_iter,
        last_energy: last_e,
    })
}

/// RHF on an orthonormal-basis Hamiltonian (S = 1), e.g. an impurity.
pub fn run_rhf_orthonormal(mo: &MOIntegrals, n_electrons: usize, opts: &RhfOptions) -> Result<RHFResult> {
    let n = mo.n_orb;
    let ao = AOBundle {
        n_ao: n,
        s: DMatrix::identity(n, n),
        hcore: mo.h1.clone(),
        kinetic: None,
        eri: mo.h2.clone(),
        e_nuc: mo.e_core,
        ao_atom_map: vec![0; n],
    };
    run_rhf(&ao, n_electrons, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_interacting_limit() {
        let n = 3;
        let ao = AOBundle {
            n_ao: n,
            s: DMatrix::identity(n, n),
            hcore: DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, -1.2, 0.5])),
            kinetic: None,
            eri: PackedEri::zeros(n),
            e_nuc: 0.25,
            ao_atom_map: vec![0; n],
        };
        let r = run_rhf(&ao, 2, &RhfOptions::default()).unwrap();
        assert!((r.e_total - (2.0 * -1.2 + 0.25)).abs() < 1e-12);
        assert!((r.mo_coeffs[(1, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_electrons_rejected() {
        let ao = AOBundle {
            n_ao: 1,
            s: DMatrix::identity(1, 1),
            hcore: DMatrix::identity(1, 1),
            kinetic: None,
            eri: PackedEri::zeros(1),
            e_nuc: 0.0,
            ao_atom_map: vec![0],
        };
        assert!(run_rhf(&ao, 1, &RhfOptions::default()).is_err());
    }
}
