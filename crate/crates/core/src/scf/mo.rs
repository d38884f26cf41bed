use nalgebra::DMatrix;

use crate::molint::eri::{pair_index, PackedEri};
use crate::molint::AOBundle;
use crate::par;
use crate::{Error, Result};

/// Hamiltonian in an orthonormal orbital basis:
/// H = e_core + Σ h_pq E_pq + ½ Σ (pq|rs) (E_pq E_rs − δ_qr E_ps).
#[derive(Clone, Debug, PartialEq)]
pub struct MOIntegrals {
    pub n_orb: usize,
    pub h1: DMatrix<f64>,
    /// Chemist-notation (pq|rs), 8-fold packed.
    pub h2: PackedEri,
    pub e_core: f64,
}

impl MOIntegrals {
    /// Dense n⁴ copy of the two-electron integrals, row-major (p,q,r,s).
    pub fn eri_dense(&self) -> Vec<f64> {
        self.h2.unpack()
    }

    /// Closed-shell Fock matrix for the first `n_occ` orbitals doubly occupied.
    pub fn fock(&self, n_occ: usize) -> DMatrix<f64> {
        let n = self.n_orb;
        let mut f = self.h1.clone();
        for p in 0..n {
            for q in 0..n {
                let mut v = 0.0;
                for k in 0..n_occ {
                    v += 2.0 * self.h2.get(p, q, k, k) - self.h2.get(p, k, k, q);
                }
                f[(p, q)] += v;
            }
        }
        f
    }

    /// Energy (including e_core) of the closed-shell determinant occupying
    /// the first `n_occ` orbitals.
    pub fn closed_shell_energy(&self, n_occ: usize) -> f64 {
        let mut e = self.e_core;
        for i in 0..n_occ {
            e += 2.0 * self.h1[(i, i)];
            for j in 0..n_occ {
                e += 2.0 * self.h2.get(i, i, j, j) - self.h2.get(i, j, j, i);
            }
        }
        e
    }

    /// Largest deviation from hermiticity of h1.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.h1 - self.h1.transpose()).amax()
    }
}

/// (pq|rs) in the basis `c` (n_ao × m) from packed AO integrals.
pub fn transform_eri(eri: &PackedEri, c: &DMatrix<f64>) -> PackedEri {
    let n = eri.n;
    let m = c.ncols();
    assert_eq!(c.nrows(), n);
    let npm = m * (m + 1) / 2;
    let ct = c.transpose();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    // First half: (ij|kl) -> (ij|rs) for every AO pair ij.
    let half: Vec<Vec<f64>> = par::map_slice(&pairs, |&(i, j)| {
        let mut a = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..=k {
                let v = eri.get(i, j, k, l);
                a[(k, l)] = v;
                a[(l, k)] = v;
            }
        }
        let t = &ct * a * c;
        let mut out = vec![0.0; npm];
        for r in 0..m {
            for s in 0..=r {
                out[pair_index(r, s)] = t[(r, s)];
            }
        }
        out
    });
    // Second half: for every MO pair rs, transform the AO pair index.
    let mo_pairs: Vec<(usize, usize)> = (0..m).flat_map(|r| (0..=r).map(move |s| (r, s))).collect();
    let second: Vec<Vec<f64>> = par::map_range(npm, |rs| {
        let mut a = DMatrix::zeros(n, n);
        for (x, &(i, j)) in pairs.iter().enumerate() {
            let v = half[x][rs];
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        let t = &ct * a * c;
        let mut out = vec![0.0; npm];
        for p in 0..m {
            for q in 0..=p {
                out[pair_index(p, q)] = t[(p, q)];
            }
        }
        out
    });
    let mut res = PackedEri::zeros(m);
    for (rs, col) in second.iter().enumerate() {
        let (r, s) = mo_pairs[rs];
        for p in 0..m {
            for q in 0..=p {
                let pq = pair_index(p, q);
                if pq >= rs {
                    res.set(p, q, r, s, col[pq]);
                }
            }
        }
    }
    res
}

/// h_pq = Cᵀ hcore C and (pq|rs) by quarter transformations; e_core = e_nuc.
pub fn ao_to_mo(ao: &AOBundle, c: &DMatrix<f64>) -> Result<MOIntegrals> {
    if c.nrows() != ao.n_ao {
        return Err(Error::Dimension(format!(
            "coefficients have {} rows, bundle has {} AOs",
            c.nrows(),
            ao.n_ao
        )));
    }
    let h1 = c.transpose() * &ao.hcore * c;
    let h1 = (&h1 + h1.transpose()) * 0.5;
    Ok(MOIntegrals {
        n_orb: c.ncols(),
        h1,
        h2: transform_eri(&ao.eri, c),
        e_core: ao.e_nuc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_transform() {
        let n = 3;
        let mut eri = PackedEri::zeros(n);
        for (x, v) in eri.data.iter_mut().enumerate() {
            *v = 0.1 * (x as f64 + 1.0).ln();
        }
        let c = DMatrix::identity(n, n);
        let t = transform_eri(&eri, &c);
        for (a, b) in t.data.iter().zip(&eri.data) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
