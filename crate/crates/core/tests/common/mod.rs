//! Independent oracles shared by the integration tests and the acceptance
//! report.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqdlab::detspace::{davidson_lowest, DavidsonOptions, DetSpace, SparseMatrix};
use sqdlab::molint::BasisName;
use sqdlab::pipeline::Problem;
use sqdlab::scan::ScanMolecule;
use sqdlab::scf::MOIntegrals;
use sqdlab::systems;

/// Complex coefficient as (re, im).
type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Sum of Pauli strings, each stored as phase · X^x Z^z (X applied after Z).
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    pub terms: HashMap<(u64, u64), C>,
}

impl PauliSum {
    fn single(x: u64, z: u64, c: C) -> Self {
        let mut terms = HashMap::new();
        terms.insert((x, z), c);
        Self { terms }
    }

    fn add_scaled(&mut self, other: &PauliSum, s: f64) {
        for (&k, &c) in &other.terms {
            let e = self.terms.entry(k).or_insert((0.0, 0.0));
            e.0 += s * c.0;
            e.1 += s * c.1;
        }
    }

    /// X^x1 Z^z1 X^x2 Z^z2 = (−1)^|z1 ∧ x2| X^(x1⊕x2) Z^(z1⊕z2).
    fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::default();
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                let mut c = cmul(c1, c2);
                if (z1 & x2).count_ones() % 2 == 1 {
                    c = (-c.0, -c.1);
                }
                let e = out.terms.entry((x1 ^ x2, z1 ^ z2)).or_insert((0.0, 0.0));
                e.0 += c.0;
                e.1 += c.1;
            }
        }
        out
    }

    /// ⟨bra|P|ket⟩ over the computational basis.
    pub fn element(&self, bra: u64, ket: u64) -> C {
        let x = bra ^ ket;
        let mut acc = (0.0, 0.0);
        for (&(px, pz), &c) in &self.terms {
            if px == x {
                let s = if (pz & ket).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                acc.0 += s * c.0;
                acc.1 += s * c.1;
            }
        }
        acc
    }
}

/// Jordan–Wigner image of a creation (or annihilation) operator on qubit p:
/// ½(X_p ∓ iY_p) Z_0 ⋯ Z_{p−1}, with Y = iXZ.
fn ladder(p: usize, create: bool) -> PauliSum {
    let bit = 1u64 << p;
    let string = PauliSum::single(0, bit - 1, (1.0, 0.0));
    let x = PauliSum::single(bit, 0, (0.5, 0.0));
    // ∓ i/2 · Y = ∓ i/2 · i X Z = ± 1/2 X Z
    let y = PauliSum::single(bit, bit, (if create { 0.5 } else { -0.5 }, 0.0));
    let mut local = x;
    local.add_scaled(&y, 1.0);
    local.mul(&string)
}

/// Qubit Hamiltonian for the electronic part (no core energy), qubit p = α
/// orbital p and qubit n + p = β orbital p.
pub fn jordan_wigner_hamiltonian(mo: &MOIntegrals) -> PauliSum {
    let n = mo.n_orb;
    let eri = mo.eri_dense();
    let g = |p: usize, q: usize, r: usize, s: usize| eri[((p * n + q) * n + r) * n + s];
    let cre: Vec<PauliSum> = (0..2 * n).map(|k| ladder(k, true)).collect();
    let ann: Vec<PauliSum> = (0..2 * n).map(|k| ladder(k, false)).collect();
    let mut h = PauliSum::default();
    for sigma in 0..2 {
        for p in 0..n {
            for q in 0..n {
                let v = mo.h1[(p, q)];
                if v.abs() > 1e-14 {
                    h.add_scaled(&cre[sigma * n + p].mul(&ann[sigma * n + q]), v);
                }
            }
        }
    }
    for sigma in 0..2 {
        for tau in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let v = g(p, q, r, s);
                            if v.abs() < 1e-14 {
                                continue;
                            }
                            // a†_pσ a†_rτ a_sτ a_qσ
                            let op = cre[sigma * n + p]
                                .mul(&cre[tau * n + r])
                                .mul(&ann[tau * n + s])
                                .mul(&ann[sigma * n + q]);
                            h.add_scaled(&op, 0.5 * v);
                        }
                    }
                }
            }
        }
    }
    h.terms.retain(|_, c| c.0.abs() > 1e-15 || c.1.abs() > 1e-15);
    h
}

/// Dense projection of a Pauli sum onto a determinant space, and the largest
/// imaginary part encountered.
pub fn pauli_matrix(h: &PauliSum, space: &DetSpace) -> (DMatrix<f64>, f64) {
    let n = space.len();
    let idx: Vec<u64> = space.dets.iter().map(|d| d.to_index(space.n_orb)).collect();
    let mut m = DMatrix::zeros(n, n);
    let mut imag: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = h.element(idx[i], idx[j]);
            m[(i, j)] = c.0;
            imag = imag.max(c.1.abs());
        }
    }
    (m, imag)
}

/// Closed-shell systems with at most 12 spin orbitals.
pub fn small_systems() -> Vec<(String, Problem)> {
    let mut out = Vec::new();
    for name in ["H2", "LiH"] {
        let sys = systems::find(name).unwrap();
        out.push((format!("{name}/sto-3g"), Problem::new(sys.molecule(), BasisName::Sto3g).unwrap()));
    }
    for (mol, r) in [(ScanMolecule::H2, 0.7414), (ScanMolecule::HeHPlus, 0.9)] {
        for basis in [BasisName::Sto3g, BasisName::B631g] {
            let m = mol.geometry(r, None).unwrap();
            out.push((format!("{mol}/{basis}"), Problem::new(m, basis).unwrap()));
        }
    }
    out
}

/// Random symmetric matrix with a Hamiltonian-like diagonal.
pub fn random_symmetric(seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(20..=220);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = rng.random_range(-5.0..5.0);
        for j in 0..i {
            let v = rng.random_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// |λ_Davidson − λ_dense| on one random matrix, with the sparse path forced.
pub fn davidson_vs_dense(seed: u64) -> f64 {
    let a = random_symmetric(seed);
    let dense = a.clone().symmetric_eigen().eigenvalues.min();
    let opts = DavidsonOptions {
        tol: 1e-10,
        max_cycles: 1000,
        dense_threshold: 0,
        ..DavidsonOptions::default()
    };
    let (e, _, _) = davidson_lowest(&SparseMatrix::from_dense(&a), &opts).unwrap();
    (e - dense).abs()
}
