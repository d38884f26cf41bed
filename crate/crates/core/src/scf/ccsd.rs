//! Spin-orbital CCSD with Stanton–Gauss intermediates.

use crate::linalg::{Diis, Tensor4};
use crate::par;
use crate::scf::amplitudes::{AmplitudeSource, Amplitudes};
use crate::scf::mp2::mp2_amplitudes;
use crate::scf::MOIntegrals;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CcsdOptions {
    pub max_iter: usize,
    /// Threshold on the largest amplitude-equation residual.
    pub amp_tol: f64,
    pub diis_depth: usize,
}

impl Default for CcsdOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            amp_tol: 1e-8,
            diis_depth: 8,
        }
    }
}

/// Spin-orbital amplitudes with interleaved spin (`2p + σ`).
#[derive(Clone, Debug)]
pub struct SpinAmplitudes {
    pub n_occ: usize,
    pub n_virt: usize,
    /// [i, a]
    pub t1: Vec<f64>,
    /// [i, j, a, b], antisymmetric.
    pub t2: Tensor4,
}

impl SpinAmplitudes {
    pub fn t1(&self, i: usize, a: usize) -> f64 {
        self.t1[i * self.n_virt + a]
    }

    /// Spin-orbital expansion of closed-shell amplitudes.
    pub fn from_spatial(amp: &Amplitudes) -> Self {
        let (o, v) = (2 * amp.n_occ, 2 * amp.n_virt);
        let mut t1 = vec![0.0; o * v];
        let mut t2 = Tensor4::zeros([o, o, v, v]);
        for i in 0..o {
            for a in 0..v {
                t1[i * v + a] = amp.t1_spin(i, a);
                for j in 0..o {
                    for b in 0..v {
                        t2.set(i, j, a, b, amp.t2_spin(i, j, a, b));
                    }
                }
            }
        }
        Self { n_occ: o, n_virt: v, t1, t2 }
    }

    /// Closed-shell spatial amplitudes (t1 from α, t2 from αβ blocks).
    pub fn to_spatial(&self, source: AmplitudeSource) -> Amplitudes {
        let (o, v) = (self.n_occ / 2, self.n_virt / 2);
        let mut amp = Amplitudes::zeros(o, v, source);
        for i in 0..o {
            for a in 0..v {
                amp.t1[(i, a)] = self.t1(2 * i, 2 * a);
                for j in 0..o {
                    for b in 0..v {
                        amp.t2.set(i, j, a, b, self.t2.get(2 * i, 2 * j + 1, 2 * a, 2 * b + 1));
                    }
                }
            }
        }
        amp
    }
}

/// Antisymmetrized spin-orbital integrals ⟨pq||rs⟩ and Fock matrix.
pub struct SpinHamiltonian {
    pub n: usize,
    pub n_occ: usize,
    pub fock: Vec<f64>,
    pub w: Vec<f64>,
}

impl SpinHamiltonian {
    pub fn new(mo: &MOIntegrals, n_occ_spatial: usize) -> Self {
        let n = 2 * mo.n_orb;
        let n_occ = 2 * n_occ_spatial;
        let eri = mo.eri_dense();
        let m = mo.n_orb;
        let g = |p: usize, q: usize, r: usize, s: usize| eri[((p * m + q) * m + r) * m + s];
        // ⟨pq|rs⟩ = (pr|qs) with spin deltas.
        let phys = |p: usize, q: usize, r: usize, s: usize| {
            if p % 2 == r % 2 && q % 2 == s % 2 {
                g(p / 2, r / 2, q / 2, s / 2)
            } else {
                0.0
            }
        };
        let mut w = vec![0.0; n * n * n * n];
        par::for_each_chunk_mut(&mut w, n * n * n, |p, chunk| {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        chunk[(q * n + r) * n + s] = phys(p, q, r, s) - phys(p, q, s, r);
                    }
                }
            }
        });
        let mut fock = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                let mut f = if p % 2 == q % 2 { mo.h1[(p / 2, q / 2)] } else { 0.0 };
                for k in 0..n_occ {
                    f += w[((p * n + k) * n + q) * n + k];
                }
                fock[p * n + q] = f;
            }
        }
        Self { n, n_occ, fock, w }
    }

    #[inline]
    pub fn w(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.w[((p * n + q) * n + r) * n + s]
    }

    #[inline]
    pub fn f(&self, p: usize, q: usize) -> f64 {
        self.fock[p * self.n + q]
    }
}

#[derive(Clone, Debug)]
pub struct CcsdResult {
    pub amplitudes: Amplitudes,
    pub spin_amplitudes: SpinAmplitudes,
    pub e_corr: f64,
    /// Reference determinant energy plus correlation (includes e_core).
    pub e_total: f64,
    pub n_iterations: usize,
    pub max_residual: f64,
}

/// CC energy from spin-orbital amplitudes.
pub fn ccsd_energy(h: &SpinHamiltonian, t: &SpinAmplitudes) -> f64 {
    let (no, nv) = (t.n_occ, t.n_virt);
    let mut e = 0.0;
    for i in 0..no {
        for a in 0..nv {
            e += h.f(i, a + no) * t.t1(i, a);
        }
    }
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    let w = h.w(i, j, a + no, b + no);
                    e += 0.25 * w * t.t2.get(i, j, a, b) + 0.5 * w * t.t1(i, a) * t.t1(j, b);
                }
            }
        }
    }
    e
}

/// Residuals of the CCSD amplitude equations; zero at the solution.
pub fn ccsd_residual(h: &SpinHamiltonian, t: &SpinAmplitudes) -> (Vec<f64>, Tensor4) {
    let (no, nv) = (t.n_occ, t.n_virt);
    let v = |p: usize| p + no;
    let t1 = |i: usize, a: usize| t.t1[i * nv + a];
    let t2 = |i: usize, j: usize, a: usize, b: usize| t.t2.get(i, j, a, b);
    let tau = |i: usize, j: usize, a: usize, b: usize| {
        t2(i, j, a, b) + t1(i, a) * t1(j, b) - t1(i, b) * t1(j, a)
    };
    let taut = |i: usize, j: usize, a: usize, b: usize| {
        t2(i, j, a, b) + 0.5 * (t1(i, a) * t1(j, b) - t1(i, b) * t1(j, a))
    };

    let mut fae = vec![0.0; nv * nv];
    for a in 0..nv {
        for e in 0..nv {
            let mut x = h.f(v(a), v(e));
            for m in 0..no {
                x -= 0.5 * h.f(m, v(e)) * t1(m, a);
                for f in 0..nv {
                    x += t1(m, f) * h.w(m, v(a), v(f), v(e));
                    for n in 0..no {
                        x -= 0.5 * taut(m, n, a, f) * h.w(m, n, v(e), v(f));
                    }
                }
            }
            fae[a * nv + e] = x;
        }
    }
    let mut fmi = vec![0.0; no * no];
    for m in 0..no {
        for i in 0..no {
            let mut x = h.f(m, i);
            for e in 0..nv {
                x += 0.5 * t1(i, e) * h.f(m, v(e));
                for n in 0..no {
                    x += t1(n, e) * h.w(m, n, i, v(e));
                    for f in 0..nv {
                        x += 0.5 * taut(i, n, e, f) * h.w(m, n, v(e), v(f));
                    }
                }
            }
            fmi[m * no + i] = x;
        }
    }
    let mut fme = vec![0.0; no * nv];
    for m in 0..no {
        for e in 0..nv {
            let mut x = h.f(m, v(e));
            for n in 0..no {
                for f in 0..nv {
                    x += t1(n, f) * h.w(m, n, v(e), v(f));
                }
            }
            fme[m * nv + e] = x;
        }
    }
    let mut wmnij = Tensor4::cube(no);
    for m in 0..no {
        for n in 0..no {
            for i in 0..no {
                for j in 0..no {
                    let mut x = h.w(m, n, i, j);
                    for e in 0..nv {
                        x += t1(j, e) * h.w(m, n, i, v(e)) - t1(i, e) * h.w(m, n, j, v(e));
                        for f in 0..nv {
                            x += 0.25 * tau(i, j, e, f) * h.w(m, n, v(e), v(f));
                        }
                    }
                    wmnij.set(m, n, i, j, x);
                }
            }
        }
    }
    let mut wabef = Tensor4::cube(nv);
    let rows = par::map_range(nv, |a| {
        let mut out = vec![0.0; nv * nv * nv];
        for b in 0..nv {
            for e in 0..nv {
                for f in 0..nv {
                    let mut x = h.w(v(a), v(b), v(e), v(f));
                    for m in 0..no {
                        x -= t1(m, b) * h.w(v(a), m, v(e), v(f)) - t1(m, a) * h.w(v(b), m, v(e), v(f));
                        for n in 0..no {
                            x += 0.25 * tau(m, n, a, b) * h.w(m, n, v(e), v(f));
                        }
                    }
                    out[(b * nv + e) * nv + f] = x;
                }
            }
        }
        out
    });
    for (a, r) in rows.into_iter().enumerate() {
        let base = a * nv * nv * nv;
        wabef.data[base..base + nv * nv * nv].copy_from_slice(&r);
    }
    // Wmbej stored as [m, b, e, j].
    let mut wmbej = Tensor4::zeros([no, nv, nv, no]);
    for m in 0..no {
        for b in 0..nv {
            for e in 0..nv {
                for j in 0..no {
                    let mut x = h.w(m, v(b), v(e), j);
                    for f in 0..nv {
                        x += t1(j, f) * h.w(m, v(b), v(e), v(f));
                    }
                    for n in 0..no {
                        x -= t1(n, b) * h.w(m, n, v(e), j);
                        for f in 0..nv {
                            x -= (0.5 * t2(j, n, f, b) + t1(j, f) * t1(n, b)) * h.w(m, n, v(e), v(f));
                        }
                    }
                    wmbej.set(m, b, e, j, x);
                }
            }
        }
    }

    let mut r1 = vec![0.0; no * nv];
    for i in 0..no {
        for a in 0..nv {
            let mut x = h.f(i, v(a));
            for e in 0..nv {
                x += t1(i, e) * fae[a * nv + e];
            }
            for m in 0..no {
                x -= t1(m, a) * fmi[m * no + i];
                for e in 0..nv {
                    x += t2(i, m, a, e) * fme[m * nv + e];
                    x -= t1(m, e) * h.w(m, v(a), i, v(e));
                    for f in 0..nv {
                        x -= 0.5 * t2(i, m, e, f) * h.w(m, v(a), v(e), v(f));
                    }
                    for n in 0..no {
                        x -= 0.5 * t2(m, n, a, e) * h.w(n, m, v(e), i);
                    }
                }
            }
            r1[i * nv + a] = x;
        }
    }

    // Dressed one-body pieces of the doubles equation.
    let mut fbe_d = vec![0.0; nv * nv];
    for b in 0..nv {
        for e in 0..nv {
            let mut x = fae[b * nv + e];
            for m in 0..no {
                x -= 0.5 * t1(m, b) * fme[m * nv + e];
            }
            fbe_d[b * nv + e] = x;
        }
    }
    let mut fmj_d = vec![0.0; no * no];
    for m in 0..no {
        for j in 0..no {
            let mut x = fmi[m * no + j];
            for e in 0..nv {
                x += 0.5 * t1(j, e) * fme[m * nv + e];
            }
            fmj_d[m * no + j] = x;
        }
    }

    let pairs: Vec<(usize, usize)> = (0..no).flat_map(|i| (0..no).map(move |j| (i, j))).collect();
    let blocks = par::map_slice(&pairs, |&(i, j)| {
        let mut out = vec![0.0; nv * nv];
        for a in 0..nv {
            for b in 0..nv {
                let mut x = h.w(i, j, v(a), v(b));
                for e in 0..nv {
                    x += t2(i, j, a, e) * fbe_d[b * nv + e] - t2(i, j, b, e) * fbe_d[a * nv + e];
                }
                for m in 0..no {
                    x -= t2(i, m, a, b) * fmj_d[m * no + j] - t2(j, m, a, b) * fmj_d[m * no + i];
                }
                for m in 0..no {
                    for n in 0..no {
                        x += 0.5 * tau(m, n, a, b) * wmnij.get(m, n, i, j);
                    }
                }
                for e in 0..nv {
                    for f in 0..nv {
                        x += 0.5 * tau(i, j, e, f) * wabef.get(a, b, e, f);
                    }
                }
                // P(ij)P(ab) Σ_me (t_imae W_mbej − t_ie t_ma ⟨mb||ej⟩)
                let term = |i: usize, j: usize, a: usize, b: usize| {
                    let mut s = 0.0;
                    for m in 0..no {
                        for e in 0..nv {
                            s += t2(i, m, a, e) * wmbej.get(m, b, e, j)
                                - t1(i, e) * t1(m, a) * h.w(m, v(b), v(e), j);
                        }
                    }
                    s
                };
                x += term(i, j, a, b) - term(j, i, a, b) - term(i, j, b, a) + term(j, i, b, a);
                for e in 0..nv {
                    x += t1(i, e) * h.w(v(a), v(b), v(e), j) - t1(j, e) * h.w(v(a), v(b), v(e), i);
                }
                for m in 0..no {
                    x -= t1(m, a) * h.w(m, v(b), i, j) - t1(m, b) * h.w(m, v(a), i, j);
                }
                out[a * nv + b] = x;
            }
        }
        out
    });
    let mut r2 = Tensor4::zeros([no, no, nv, nv]);
    for (x, blk) in blocks.into_iter().enumerate() {
        let base = x * nv * nv;
        r2.data[base..base + nv * nv].copy_from_slice(&blk);
    }
    (r1, r2)
}

/// Solve the CCSD equations from an MP2 start. `eps` supplies the
/// denominators of the quasi-Newton update.
pub fn ccsd_solve(mo: &MOIntegrals, eps: &[f64], n_occ: usize, opts: &CcsdOptions) -> Result<CcsdResult> {
    let (mp2, _) = mp2_amplitudes(mo, eps, n_occ)?;
    let h = SpinHamiltonian::new(mo, n_occ);
    let mut t = SpinAmplitudes::from_spatial(&mp2);
    let (no, nv) = (t.n_occ, t.n_virt);
    let e_so = |p: usize| eps[p / 2];
    let d1 = |i: usize, a: usize| e_so(i) - e_so(a + no);
    let d2 = |i: usize, j: usize, a: usize, b: usize| e_so(i) + e_so(j) - e_so(a + no) - e_so(b + no);
    let mut diis = Diis::new(opts.diis_depth);
    let mut e_old = ccsd_energy(&h, &t);
    let mut last_de = f64::INFINITY;
    let mut growing = 0;
    let e_ref = mo.closed_shell_energy(n_occ);
    for it in 0..opts.max_iter {
        let (r1, r2) = ccsd_residual(&h, &t);
        let res = r1.iter().chain(&r2.data).fold(0.0f64, |m, x| m.max(x.abs()));
        if res < opts.amp_tol {
            let e_corr = ccsd_energy(&h, &t);
            return Ok(CcsdResult {
                amplitudes: t.to_spatial(AmplitudeSource::Ccsd),
                spin_amplitudes: t,
                e_corr,
                e_total: e_ref + e_corr,
                n_iterations: it,
                max_residual: res,
            });
        }
        let mut new = t.clone();
        for i in 0..no {
            for a in 0..nv {
                new.t1[i * nv + a] += r1[i * nv + a] / d1(i, a);
                for j in 0..no {
                    for b in 0..nv {
                        let x = r2.idx(i, j, a, b);
                        new.t2.data[x] += r2.data[x] / d2(i, j, a, b);
                    }
                }
            }
        }
        let flat: Vec<f64> = new.t1.iter().chain(&new.t2.data).copied().collect();
        let err: Vec<f64> = flat
            .iter()
            .zip(t.t1.iter().chain(&t.t2.data))
            .map(|(a, b)| a - b)
            .collect();
        let ext = diis.extrapolate(flat, err);
        new.t1.copy_from_slice(&ext[..no * nv]);
        new.t2.data.copy_from_slice(&ext[no * nv..]);
        t = new;
        let e = ccsd_energy(&h, &t);
        let de = (e - e_old).abs();
        if !e.is_finite() {
            return Err(Error::Diverged { method: "CCSD", iteration: it });
        }
        if de > last_de && de > 1e-10 {
            growing += 1;
            if growing >= 5 {
                return Err(Error::Diverged { method: "CCSD", iteration: it });
            }
        } else {
            growing = 0;
        }
        last_de = de;
        e_old = e;
    }
    Err(Error::NotConverged {
        method: "CCSD",
        iterations: opts.max_iter,
        last_energy: e_ref + e_old,
    })
}
