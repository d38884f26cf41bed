use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::det::{apply_ops, Determinant};
use super::space::DetSpace;
use crate::linalg::Tensor4;
use crate::par;

/// Spin-resolved one-body and spin-summed two-body reduced density matrices.
///
/// `dm2[p,q,r,s] = Σ_στ ⟨a†_pσ a†_rτ a_sτ a_qσ⟩`, so that
/// E = Σ h_pq dm1[p,q] + ½ Σ (pq|rs) dm2[p,q,r,s].
#[derive(Clone, Debug)]
pub struct Rdms {
    pub dm1a: DMatrix<f64>,
    pub dm1b: DMatrix<f64>,
    pub dm2: Option<Tensor4>,
}

impl Rdms {
    pub fn dm1(&self) -> DMatrix<f64> {
        &self.dm1a + &self.dm1b
    }

    /// [α_0..α_{n−1}, β_0..β_{n−1}].
    pub fn avg_occupancy(&self) -> Vec<f64> {
        let n = self.dm1a.nrows();
        (0..n).map(|p| self.dm1a[(p, p)]).chain((0..n).map(|p| self.dm1b[(p, p)])).collect()
    }
}

fn chunks(len: usize) -> Vec<(usize, usize)> {
    let n_chunks = len.clamp(1, 64);
    let size = len.div_ceil(n_chunks);
    (0..n_chunks)
        .map(|c| (c * size, ((c + 1) * size).min(len)))
        .filter(|(a, b)| a < b)
        .collect()
}

/// ⟨bra|…|ket⟩ transition density matrices over one space.
pub fn transition_rdms(bra: &[f64], ket: &[f64], space: &DetSpace, with_dm2: bool) -> Rdms {
    let n = space.n_orb;
    let n2 = 2 * n;
    let lookup = |occ: u64| space.position(&Determinant::from_index(occ, n));
    let parts = par::map_slice(&chunks(space.len()), |&(lo, hi)| {
        let mut d1 = vec![0.0; n2 * n2];
        let mut d2 = if with_dm2 { vec![0.0; n * n * n * n] } else { Vec::new() };
        for j in lo..hi {
            let cj = ket[j];
            if cj == 0.0 {
                continue;
            }
            let occ = space.dets[j].to_index(n);
            let occupied: Vec<usize> = (0..n2).filter(|&k| occ >> k & 1 == 1).collect();
            for &q in &occupied {
                for p in (0..n2).filter(|&p| p / n == q / n) {
                    if let Some((s, o)) = apply_ops(occ, &[(p, true), (q, false)]) {
                        if let Some(i) = lookup(o) {
                            d1[p * n2 + q] += s * bra[i] * cj;
                        }
                    }
                }
            }
            if !with_dm2 {
                continue;
            }
            for &q in &occupied {
                for &s in &occupied {
                    if s == q {
                        continue;
                    }
                    for r in (0..n2).filter(|&r| r / n == s / n) {
                        for p in (0..n2).filter(|&p| p / n == q / n) {
                            if let Some((sg, o)) = apply_ops(occ, &[(p, true), (r, true), (s, false), (q, false)]) {
                                if let Some(i) = lookup(o) {
                                    let (pp, qq, rr, ss) = (p % n, q % n, r % n, s % n);
                                    d2[((pp * n + qq) * n + rr) * n + ss] += sg * bra[i] * cj;
                                }
                            }
                        }
                    }
                }
            }
        }
        (d1, d2)
    });
    let mut d1 = vec![0.0; n2 * n2];
    let mut d2 = if with_dm2 { vec![0.0; n * n * n * n] } else { Vec::new() };
    for (a, b) in parts {
        d1.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        d2.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    }
    let dm1a = DMatrix::from_fn(n, n, |p, q| d1[p * n2 + q]);
    let dm1b = DMatrix::from_fn(n, n, |p, q| d1[(p + n) * n2 + q + n]);
    Rdms {
        dm1a,
        dm1b,
        dm2: with_dm2.then(|| Tensor4 { dims: [n; 4], data: d2 }),
    }
}

/// Expectation-value RDMs of a normalized vector.
pub fn compute_rdms(v: &[f64], space: &DetSpace, with_dm2: bool) -> Rdms {
    transition_rdms(v, v, space, with_dm2)
}

/// ⟨S²⟩ = ‖S₊ψ‖² + S_z(S_z + 1).
pub fn spin_square(v: &[f64], space: &DetSpace) -> f64 {
    let n = space.n_orb;
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    for (d, &c) in space.dets.iter().zip(v) {
        if c == 0.0 {
            continue;
        }
        let occ = d.to_index(n);
        for p in 0..n {
            if let Some((s, o)) = apply_ops(occ, &[(p, true), (n + p, false)]) {
                *out.entry(o).or_insert(0.0) += s * c;
            }
        }
    }
    let sz = 0.5 * (space.n_alpha as f64 - space.n_beta as f64);
    out.values().map(|x| x * x).sum::<f64>() + sz * (sz + 1.0)
}
