//! Complex single-particle rotations: exponentials, logarithms, their
//! lift to N-particle sectors, and adjacent-mode Givens decompositions.

use nalgebra::{DMatrix, DVector};

use super::state::C64;
use crate::detspace::det::bits;
use crate::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending; each
/// eigenvector's largest component is made real and positive.
pub fn herm_eigh(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let w = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut v = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let mut best = 0;
        for r in 0..n {
            if col[r].norm() > col[best].norm() + 1e-12 {
                best = r;
            }
        }
        let ph = if col[best].norm() > 0.0 { col[best].conj() / col[best].norm() } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            v[(r, k)] = col[r] * ph;
        }
    }
    (w, v)
}

pub fn anti_hermiticity_error(t: &DMatrix<C64>) -> f64 {
    (t + t.adjoint()).iter().fold(0.0f64, |m, x| m.max(x.norm()))
}

/// e^T for anti-Hermitian T.
pub fn expm_anti_hermitian(t: &DMatrix<C64>) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    let (w, v) = herm_eigh(&(t * i));
    let d = DMatrix::from_diagonal(&w.map(|x| C64::from_polar(1.0, -x)));
    &v * d * v.adjoint()
}

/// Principal logarithm of a unitary matrix (anti-Hermitian result).
pub fn logm_unitary(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = u.nrows();
    let schur = nalgebra::linalg::Schur::try_new(u.clone(), 1e-14, 10_000)
        .ok_or_else(|| Error::Invalid("Schur decomposition of orbital rotation failed".into()))?;
    let (q, t) = schur.unpack();
    let logs = DVector::from_iterator(n, (0..n).map(|k| C64::new(0.0, t[(k, k)].arg())));
    let l = &q * DMatrix::from_diagonal(&logs) * q.adjoint();
    Ok((&l - l.adjoint()) * C64::new(0.5, 0.0))
}

/// Λ^N(U): ⟨I|Λ^N U|J⟩ = det U[I, J] over occupation strings.
pub fn exterior_power(u: &DMatrix<C64>, strings: &[u32]) -> DMatrix<C64> {
    let m = strings.len();
    let idx: Vec<Vec<usize>> = strings.iter().map(|&s| bits(s).collect()).collect();
    let k = idx.first().map_or(0, |v| v.len());
    DMatrix::from_fn(m, m, |a, b| {
        if k == 0 {
            return C64::new(1.0, 0.0);
        }
        let sub = DMatrix::from_fn(k, k, |r, c| u[(idx[a][r], idx[b][c])]);
        sub.determinant()
    })
}

/// Adjacent-mode Givens factorization U = G_1† ⋯ G_K† D.
///
/// Returns the 2×2 blocks in application order (G_K† first) with their
/// lower mode index, followed by the diagonal phases D applied before them.
pub fn givens_decomposition(u: &DMatrix<C64>) -> (Vec<(usize, [[C64; 2]; 2])>, Vec<C64>) {
    let n = u.nrows();
    let mut w = u.clone();
    let mut rec = Vec::new();
    for c in 0..n {
        for r in (c + 1..n).rev() {
            let (x, y) = (w[(r - 1, c)], w[(r, c)]);
            if y.norm() < 1e-15 {
                continue;
            }
            let nrm = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let g = [[x.conj() / nrm, y.conj() / nrm], [-y / nrm, x / nrm]];
            for col in 0..n {
                let (a, b) = (w[(r - 1, col)], w[(r, col)]);
                w[(r - 1, col)] = g[0][0] * a + g[0][1] * b;
                w[(r, col)] = g[1][0] * a + g[1][1] * b;
            }
            rec.push((r - 1, g));
        }
    }
    let phases = (0..n).map(|p| w[(p, p)]).collect();
    let ops = rec
        .into_iter()
        .rev()
        .map(|(q, g)| (q, [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]]))
        .collect();
    (ops, phases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_anti_hermitian(n: usize) -> DMatrix<C64> {
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64).cos()));
        (&m - m.adjoint()) * C64::new(0.3, 0.0)
    }

    #[test]
    fn exp_log_round_trip() {
        let t = sample_anti_hermitian(4);
        let u = expm_anti_hermitian(&t);
        let unit = &u.adjoint() * &u - DMatrix::identity(4, 4);
        assert!(unit.iter().all(|x| x.norm() < 1e-12));
        let l = logm_unitary(&u).unwrap();
        let back = expm_anti_hermitian(&l);
        assert!((back - u).iter().all(|x| x.norm() < 1e-10));
    }

    #[test]
    fn givens_reconstructs() {
        let u = expm_anti_hermitian(&sample_anti_hermitian(5));
        let (ops, phases) = givens_decomposition(&u);
        let mut m = DMatrix::from_diagonal(&DVector::from_vec(phases));
        for (q, g) in ops {
            let mut e = DMatrix::<C64>::identity(5, 5);
            e[(q, q)] = g[0][0];
            e[(q, q + 1)] = g[0][1];
            e[(q + 1, q)] = g[1][0];
            e[(q + 1, q + 1)] = g[1][1];
            m = e * m;
        }
        assert!((m - u).iter().all(|x| x.norm() < 1e-12));
    }
}
