//! Unrelaxed CCSD densities evaluated in the determinant space.
//!
//! With |R⟩ = e^T|Φ⟩ and ⟨L| = ⟨Φ|(1 + Λ)e^{−T}, the densities are the
//! transition densities ⟨L|a†a|R⟩ and ⟨L|a†a†aa|R⟩, symmetrized. Λ solves
//! ⟨Φ|(1 + Λ)(H̄ − E)|μ⟩ = 0 for every single and double μ. Only meant for
//! small active spaces where the full sector fits in memory.

use crate::detspace::det::apply_ops;
use crate::detspace::{build_subspace_hamiltonian, enumerate_symmetry_space, transition_rdms, DetSpace, Determinant, Rdms};
use crate::linalg::{Diis, Tensor4};
use crate::par;
use crate::scf::{CcsdResult, MOIntegrals};
use crate::{Error, Result};

/// One excitation τ_μ as fermionic operators (rightmost acts first).
struct Excitation {
    ops: Vec<(usize, bool)>,
    /// Orbital-energy gap used to precondition the Λ update.
    gap: f64,
}

fn excitations(n_orb: usize, n_occ: usize, eps: &[f64]) -> Vec<Excitation> {
    let (o, v) = (2 * n_occ, 2 * (n_orb - n_occ));
    let occ_q = |i: usize| i / 2 + (i % 2) * n_orb;
    let vir_q = |a: usize| n_occ + a / 2 + (a % 2) * n_orb;
    let e_occ = |i: usize| eps[i / 2];
    let e_vir = |a: usize| eps[n_occ + a / 2];
    let mut out = Vec::new();
    for i in 0..o {
        for a in 0..v {
            if i % 2 == a % 2 {
                out.push(Excitation {
                    ops: vec![(vir_q(a), true), (occ_q(i), false)],
                    gap: e_vir(a) - e_occ(i),
                });
            }
        }
    }
    for i in 0..o {
        for j in i + 1..o {
            for a in 0..v {
                for b in a + 1..v {
                    if (i % 2 + j % 2) == (a % 2 + b % 2) {
                        out.push(Excitation {
                            ops: vec![(vir_q(a), true), (vir_q(b), true), (occ_q(j), false), (occ_q(i), false)],
                            gap: e_vir(a) + e_vir(b) - e_occ(i) - e_occ(j),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Sparse excitation operator Σ_μ x_μ τ_μ over a determinant space, stored
/// by source column.
struct ExcitationOperator {
    cols: Vec<Vec<(usize, f64)>>,
}

impl ExcitationOperator {
    fn new(space: &DetSpace, exc: &[Excitation], amps: &[f64]) -> Self {
        let n = space.n_orb;
        let cols = par::map_slice(&space.dets, |d| {
            let occ = d.to_index(n);
            let mut col = Vec::new();
            for (e, &t) in exc.iter().zip(amps) {
                if t == 0.0 {
                    continue;
                }
                if let Some((s, o)) = apply_ops(occ, &e.ops) {
                    if let Some(i) = space.position(&Determinant::from_index(o, n)) {
                        col.push((i, s * t));
                    }
                }
            }
            col
        });
        Self { cols }
    }

    fn apply(&self, x: &[f64], adjoint: bool) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (j, col) in self.cols.iter().enumerate() {
            if adjoint {
                y[j] = col.iter().map(|&(i, v)| v * x[i]).sum();
            } else if x[j] != 0.0 {
                for &(i, v) in col {
                    y[i] += v * x[j];
                }
            }
        }
        y
    }

    /// exp(±T) x or exp(±T†) x; the series terminates because T is nilpotent.
    fn exp_apply(&self, x: &[f64], sign: f64, adjoint: bool) -> Vec<f64> {
        let mut out = x.to_vec();
        let mut term = x.to_vec();
        for k in 1..=64 {
            term = self.apply(&term, adjoint);
            let f = sign / k as f64;
            let mut norm = 0.0f64;
            for (o, t) in out.iter_mut().zip(term.iter_mut()) {
                *t *= f;
                *o += *t;
                norm = norm.max(t.abs());
            }
            if norm == 0.0 {
                break;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CcDensities {
    pub rdms: Rdms,
    /// ⟨Φ|H̄|Φ⟩ + e_core, which should equal the CCSD energy.
    pub e_check: f64,
    pub lambda_iterations: usize,
}

/// CCSD one- and two-body densities for a closed-shell canonical reference
/// occupying the first `n_occ` orbitals.
pub fn ccsd_densities(mo: &MOIntegrals, eps: &[f64], n_occ: usize, cc: &CcsdResult) -> Result<CcDensities> {
    let n = mo.n_orb;
    let space = enumerate_symmetry_space(n, n_occ, n_occ)?;
    let h = build_subspace_hamiltonian(&space, mo)?;
    let exc = excitations(n, n_occ, eps);
    let t = &cc.spin_amplitudes;
    let (o, v) = (2 * n_occ, 2 * (n - n_occ));
    if t.n_occ != o || t.n_virt != v {
        return Err(Error::Dimension("CCSD amplitudes vs active space".into()));
    }
    let mut amps = Vec::with_capacity(exc.len());
    for i in 0..o {
        for a in 0..v {
            if i % 2 == a % 2 {
                amps.push(t.t1(i, a));
            }
        }
    }
    for i in 0..o {
        for j in i + 1..o {
            for a in 0..v {
                for b in a + 1..v {
                    if (i % 2 + j % 2) == (a % 2 + b % 2) {
                        amps.push(t.t2.get(i, j, a, b));
                    }
                }
            }
        }
    }
    let top = ExcitationOperator::new(&space, &exc, &amps);
    let hf = Determinant::hartree_fock(n_occ, n_occ);
    let ref_idx = space.position(&hf).ok_or_else(|| Error::Invalid("reference determinant missing".into()))?;
    let dim = space.len();
    let mut phi = vec![0.0; dim];
    phi[ref_idx] = 1.0;
    let r = top.exp_apply(&phi, 1.0, false);
    let hv = |x: &[f64]| {
        let mut y = vec![0.0; dim];
        h.matvec(x, &mut y);
        y
    };
    let hr = hv(&r);
    let e = top.exp_apply(&hr, -1.0, false)[ref_idx];

    // Position and sign of τ_μ|Φ⟩.
    let targets: Vec<(usize, f64)> = exc
        .iter()
        .map(|x| {
            let (s, occ) = apply_ops(hf.to_index(n), &x.ops).expect("excitation from the reference");
            (space.position(&Determinant::from_index(occ, n)).unwrap(), s)
        })
        .collect();
    let build_l = |lam: &[f64]| {
        let mut l = phi.clone();
        for (&(k, s), &x) in targets.iter().zip(lam) {
            l[k] += s * x;
        }
        l
    };
    let mut lam = amps.clone();
    let mut diis = Diis::new(8);
    let mut converged = None;
    for it in 0..200 {
        let y = top.exp_apply(&build_l(&lam), -1.0, true);
        let w = top.exp_apply(&hv(&y), 1.0, true);
        let res: Vec<f64> = targets
            .iter()
            .zip(&lam)
            .map(|(&(k, s), &x)| s * w[k] - e * x)
            .collect();
        let max = res.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max < 1e-9 {
            converged = Some(it);
            break;
        }
        let next: Vec<f64> = lam
            .iter()
            .zip(&res)
            .zip(&exc)
            .map(|((x, r), ex)| x - r / ex.gap)
            .collect();
        let err: Vec<f64> = next.iter().zip(&lam).map(|(a, b)| a - b).collect();
        lam = diis.extrapolate(next, err);
    }
    let lambda_iterations = converged.ok_or(Error::NotConverged {
        method: "CCSD lambda",
        iterations: 200,
        last_energy: e + mo.e_core,
    })?;
    let bra = top.exp_apply(&build_l(&lam), -1.0, true);
    let raw = transition_rdms(&bra, &r, &space, true);
    let dm1a = (&raw.dm1a + raw.dm1a.transpose()) * 0.5;
    let dm1b = (&raw.dm1b + raw.dm1b.transpose()) * 0.5;
    let d2 = raw.dm2.expect("requested");
    let mut dm2 = Tensor4::cube(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    dm2.set(p, q, r, s, 0.5 * (d2.get(p, q, r, s) + d2.get(q, p, s, r)));
                }
            }
        }
    }
    Ok(CcDensities {
        rdms: Rdms { dm1a, dm1b, dm2: Some(dm2) },
        e_check: e + mo.e_core,
        lambda_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Problem;
    use crate::scf::CcsdOptions;
    use crate::systems;

    fn energy_from(mo: &MOIntegrals, rdms: &Rdms) -> f64 {
        let n = mo.n_orb;
        let d1 = rdms.dm1();
        let d2 = rdms.dm2.as_ref().unwrap();
        let mut e = mo.e_core;
        for p in 0..n {
            for q in 0..n {
                e += mo.h1[(p, q)] * d1[(p, q)];
                for r in 0..n {
                    for s in 0..n {
                        e += 0.5 * mo.h2.get(p, q, r, s) * d2.get(p, q, r, s);
                    }
                }
            }
        }
        e
    }

    #[test]
    fn lih_densities_reproduce_ccsd_energy() {
        let p = Problem::new(systems::find("LiH").unwrap().molecule(), crate::molint::BasisName::Sto3g).unwrap();
        let eps = p.eps();
        let cc = crate::scf::ccsd_solve(&p.mo, &eps, p.n_alpha, &CcsdOptions::default()).unwrap();
        let d = ccsd_densities(&p.mo, &eps, p.n_alpha, &cc).unwrap();
        assert!((d.e_check - cc.e_total).abs() < 1e-9);
        let tr = d.rdms.dm1().trace();
        assert!((tr - 4.0).abs() < 1e-9, "{tr}");
        // The Λ functional is stationary, so the density energy is the CC energy.
        let e = energy_from(&p.mo, &d.rdms);
        assert!((e - cc.e_total).abs() < 1e-8, "{e} vs {}", cc.e_total);
    }
}
