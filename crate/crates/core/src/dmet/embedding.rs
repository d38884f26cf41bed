//! Schmidt baths, impurity Hamiltonians and active-space truncation.

use nalgebra::DMatrix;

use crate::linalg::{eigh, Tensor4};
use crate::molint::{AOBundle, PackedEri};
use crate::scf::{coulomb_exchange, run_rhf_orthonormal, transform_eri, MOIntegrals, RhfOptions};
use crate::{Error, Result};

/// Occupation window (δ, 2 − δ) for bath orbitals.
pub const BATH_DELTA: f64 = 1e-8;

/// Mean-field data in the localized basis shared by all fragments.
#[derive(Clone, Debug)]
pub struct LocalizedReference {
    /// AO → LO coefficients (XᵀSX = 1).
    pub x: DMatrix<f64>,
    /// RHF density in the LO basis (trace = N).
    pub density: DMatrix<f64>,
    pub n_electrons: usize,
}

impl LocalizedReference {
    pub fn new(ao: &AOBundle, x: DMatrix<f64>, mo_coeffs: &DMatrix<f64>, n_occ: usize) -> Self {
        let c_lo = x.transpose() * &ao.s * mo_coeffs.columns(0, n_occ);
        let density = &c_lo * c_lo.transpose() * 2.0;
        Self { x, density, n_electrons: 2 * n_occ }
    }
}

/// Fragment plus bath orbitals and the impurity Hamiltonian at μ = 0.
#[derive(Clone, Debug)]
pub struct EmbeddingProblem {
    pub fragment_id: usize,
    /// LO indices of the fragment.
    pub fragment: Vec<usize>,
    /// LO-basis embedding orbitals: fragment columns first, then bath.
    pub b: DMatrix<f64>,
    pub n_bath: usize,
    /// Bᵀ h B.
    pub h_emb: DMatrix<f64>,
    /// Bᵀ (J − ½K)[D_core] B.
    pub v_core: DMatrix<f64>,
    pub eri: PackedEri,
    /// e_nuc plus the energy of the frozen environment core.
    pub e_core: f64,
    pub n_electrons: usize,
}

impl EmbeddingProblem {
    pub fn n_orb(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_frag(&self) -> usize {
        self.fragment.len()
    }

    /// Impurity integrals with −μ on the fragment diagonal.
    pub fn hamiltonian(&self, mu: f64) -> MOIntegrals {
        let mut h1 = &self.h_emb + &self.v_core;
        for i in 0..self.n_frag() {
            h1[(i, i)] -= mu;
        }
        MOIntegrals {
            n_orb: self.n_orb(),
            h1,
            h2: self.eri.clone(),
            e_core: self.e_core,
        }
    }
}

/// Schmidt decomposition of the RHF density for one fragment.
pub fn build_embedding(
    ao: &AOBundle,
    reference: &LocalizedReference,
    fragment_id: usize,
    fragment: &[usize],
) -> Result<EmbeddingProblem> {
    let n = reference.density.nrows();
    let err = |message: String| Error::Dmet { fragment: fragment_id, message };
    if fragment.is_empty() {
        return Err(err("empty fragment".into()));
    }
    let env: Vec<usize> = (0..n).filter(|i| !fragment.contains(i)).collect();
    let d_env = DMatrix::from_fn(env.len(), env.len(), |a, b| reference.density[(env[a], env[b])]);
    let (w, v) = if env.is_empty() {
        (nalgebra::DVector::zeros(0), DMatrix::zeros(0, 0))
    } else {
        eigh(&d_env)
    };
    let bath: Vec<usize> = (0..env.len()).filter(|&k| w[k] > BATH_DELTA && w[k] < 2.0 - BATH_DELTA).collect();
    let core: Vec<usize> = (0..env.len()).filter(|&k| w[k] >= 2.0 - BATH_DELTA).collect();
    if bath.len() > fragment.len() {
        return Err(err(format!("{} bath orbitals for {} fragment orbitals", bath.len(), fragment.len())));
    }
    let coupled = fragment
        .iter()
        .any(|&i| env.iter().any(|&j| reference.density[(i, j)].abs() > 1e-6));
    if bath.is_empty() && coupled {
        return Err(err("fragment is entangled with the environment but no bath orbital survives".into()));
    }
    let nf = fragment.len();
    let mut b = DMatrix::zeros(n, nf + bath.len());
    for (a, &i) in fragment.iter().enumerate() {
        b[(i, a)] = 1.0;
    }
    for (c, &k) in bath.iter().enumerate() {
        for (r, &i) in env.iter().enumerate() {
            b[(i, nf + c)] = v[(r, k)];
        }
    }
    let mut d_core = DMatrix::<f64>::zeros(n, n);
    for &k in &core {
        for (r, &i) in env.iter().enumerate() {
            for (s, &j) in env.iter().enumerate() {
                d_core[(i, j)] += 2.0 * v[(r, k)] * v[(s, k)];
            }
        }
    }
    let n_el_f = reference.n_electrons as f64 - d_core.trace();
    let n_el = n_el_f.round();
    if (n_el_f - n_el).abs() > 1e-3 || n_el < 0.0 || n_el as usize % 2 != 0 {
        return Err(err(format!("impurity electron count {n_el_f:.6} is not an even integer")));
    }

    let x = &reference.x;
    let h_lo = x.transpose() * &ao.hcore * x;
    let d_core_ao = x * &d_core * x.transpose();
    let (j, k) = coulomb_exchange(&ao.eri, &d_core_ao);
    let v_lo = x.transpose() * (j - k * 0.5) * x;
    let e_core = ao.e_nuc + (&d_core * (&h_lo + &v_lo * 0.5)).trace();
    let b_ao = x * &b;
    Ok(EmbeddingProblem {
        fragment_id,
        fragment: fragment.to_vec(),
        h_emb: b.transpose() * &h_lo * &b,
        v_core: b.transpose() * &v_lo * &b,
        eri: transform_eri(&ao.eri, &b_ao),
        e_core,
        n_bath: bath.len(),
        n_electrons: n_el as usize,
        b,
    })
}

/// Impurity RHF followed by the HOMO/LUMO window.
#[derive(Clone, Debug)]
pub struct ActiveSpace {
    /// Active-space integrals in the canonical impurity orbitals; the folded
    /// occupied orbitals enter through h1 and e_core.
    pub mo: MOIntegrals,
    /// Orbital energies of the active orbitals.
    pub eps: Vec<f64>,
    /// Impurity-basis coefficients of the active orbitals.
    pub coeffs: DMatrix<f64>,
    /// Density of the folded occupied orbitals in the impurity basis.
    pub d_frozen: DMatrix<f64>,
    pub n_electrons: usize,
}

impl ActiveSpace {
    pub fn n_orb(&self) -> usize {
        self.mo.n_orb
    }
}

/// Keep the `k_occ` highest occupied and `k_vir` lowest virtual canonical
/// orbitals of the impurity RHF solution. Smaller impurities keep every
/// orbital (a pure rotation to the canonical basis).
pub fn truncate_active_space(imp: &MOIntegrals, n_electrons: usize, k_occ: usize, k_vir: usize) -> Result<ActiveSpace> {
    let n = imp.n_orb;
    let rhf = run_rhf_orthonormal(imp, n_electrons, &RhfOptions { conv_tol: 1e-10, ..RhfOptions::default() })?;
    let no = n_electrons / 2;
    let ko = k_occ.min(no);
    let kv = k_vir.min(n - no);
    let c = &rhf.mo_coeffs;
    let frozen = no - ko;
    let cf = c.columns(0, frozen);
    let d_frozen = &cf * cf.transpose() * 2.0;
    let ca = c.columns(frozen, ko + kv).into_owned();
    let (j, k) = coulomb_exchange(&imp.h2, &d_frozen);
    let v_fc = j - k * 0.5;
    let e_core = imp.e_core + (&d_frozen * (&imp.h1 + &v_fc * 0.5)).trace();
    let mo = MOIntegrals {
        n_orb: ko + kv,
        h1: ca.transpose() * (&imp.h1 + v_fc) * &ca,
        h2: transform_eri(&imp.h2, &ca),
        e_core,
    };
    Ok(ActiveSpace {
        mo,
        eps: rhf.orbital_energies.as_slice()[frozen..frozen + ko + kv].to_vec(),
        coeffs: ca,
        d_frozen,
        n_electrons: 2 * ko,
    })
}

/// Back-transform active-space RDMs into the impurity basis and add the
/// folded occupied orbitals: Γ += D_f⊗D_f − ½ D_f[p,s]D_f[r,q] plus the
/// matching frozen/active cross terms.
pub fn embed_rdms(act: &ActiveSpace, d1a: &DMatrix<f64>, d2a: &Tensor4) -> (DMatrix<f64>, Tensor4) {
    let c = &act.coeffs;
    let n = c.nrows();
    let m = c.ncols();
    let da = c * d1a * c.transpose();
    let df = &act.d_frozen;
    let d1 = df + &da;

    // Four quarter transforms of the active 2-RDM.
    let step = |src: &[f64], dims: [usize; 4]| -> Vec<f64> {
        // Transform the last index and rotate it to the front.
        let [a, b, cc, d] = dims;
        let mut out = vec![0.0; n * a * b * cc];
        for p in 0..n {
            for i in 0..a {
                for j in 0..b {
                    for k in 0..cc {
                        let base = ((i * b + j) * cc + k) * d;
                        let mut s = 0.0;
                        for l in 0..d {
                            s += c[(p, l)] * src[base + l];
                        }
                        out[((p * a + i) * b + j) * cc + k] = s;
                    }
                }
            }
        }
        out
    };
    let t1 = step(&d2a.data, [m, m, m, m]);
    let t2 = step(&t1, [n, m, m, m]);
    let t3 = step(&t2, [n, n, m, m]);
    let t4 = step(&t3, [n, n, n, m]);
    let mut d2 = Tensor4::cube(n);
    d2.data = t4;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = df[(p, q)] * df[(r, s)] - 0.5 * df[(p, s)] * df[(r, q)]
                        + df[(p, q)] * da[(r, s)]
                        + da[(p, q)] * df[(r, s)]
                        - 0.5 * (df[(p, s)] * da[(r, q)] + da[(p, s)] * df[(r, q)]);
                    d2.add(p, q, r, s, v);
                }
            }
        }
    }
    (d1, d2)
}

/// Fragment energy E_A = Σ_{i∈A,p} D[i,p](h + ½V_core)[p,i] + ½ Σ_{i∈A} Γ[i,p,q,r](ip|qr).
pub fn fragment_energy(emb: &EmbeddingProblem, d1: &DMatrix<f64>, d2: &Tensor4) -> f64 {
    let n = emb.n_orb();
    let hv = &emb.h_emb + &emb.v_core * 0.5;
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for i in 0..emb.n_frag() {
        for p in 0..n {
            e1 += d1[(i, p)] * hv[(p, i)];
            for q in 0..n {
                for r in 0..n {
                    e2 += d2.get(i, p, q, r) * emb.eri.get(i, p, q, r);
                }
            }
        }
    }
    e1 + 0.5 * e2
}
