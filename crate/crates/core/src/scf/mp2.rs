use crate::scf::amplitudes::{AmplitudeSource, Amplitudes};
use crate::scf::MOIntegrals;
use crate::{Error, Result};

/// Closed-shell MP2 amplitudes and correlation energy.
///
/// t2[i,j,a,b] = (ia|jb) / (ε_i + ε_j − ε_a − ε_b),
/// E = Σ t2[i,j,a,b] (2(ia|jb) − (ib|ja)).
pub fn mp2_amplitudes(mo: &MOIntegrals, eps: &[f64], n_occ: usize) -> Result<(Amplitudes, f64)> {
    let n = mo.n_orb;
    if eps.len() != n || n_occ > n {
        return Err(Error::Dimension("orbital energies / n_occ".into()));
    }
    let nv = n - n_occ;
    let mut amp = Amplitudes::zeros(n_occ, nv, AmplitudeSource::Mp2);
    let mut e = 0.0;
    for i in 0..n_occ {
        for j in 0..n_occ {
            for a in 0..nv {
                for b in 0..nv {
                    let (pa, pb) = (a + n_occ, b + n_occ);
                    let d = eps[i] + eps[j] - eps[pa] - eps[pb];
                    if d.abs() < 1e-8 {
                        return Err(Error::Denominator(i, j, pa, pb));
                    }
                    let iajb = mo.h2.get(i, pa, j, pb);
                    let ibja = mo.h2.get(i, pb, j, pa);
                    let t = iajb / d;
                    amp.t2.set(i, j, a, b, t);
                    e += t * (2.0 * iajb - ibja);
                }
            }
        }
    }
    Ok((amp, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molint::eri::PackedEri;
    use nalgebra::DMatrix;

    #[test]
    fn uncorrelated_integrals_give_zero() {
        let n = 3;
        let mut h2 = PackedEri::zeros(n);
        for p in 0..n {
            for q in 0..n {
                h2.set(p, p, q, q, 0.5);
            }
        }
        let mo = MOIntegrals {
            n_orb: n,
            h1: DMatrix::zeros(n, n),
            h2,
            e_core: 0.0,
        };
        let (amp, e) = mp2_amplitudes(&mo, &[-1.0, 0.5, 0.7], 1).unwrap();
        assert_eq!(e, 0.0);
        assert!(amp.t2.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn vanishing_gap_reports_quadruple() {
        let mo = MOIntegrals {
            n_orb: 2,
            h1: DMatrix::zeros(2, 2),
            h2: PackedEri::zeros(2),
            e_core: 0.0,
        };
        match mp2_amplitudes(&mo, &[0.0, 0.0], 1) {
            Err(Error::Denominator(0, 0, 1, 1)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
