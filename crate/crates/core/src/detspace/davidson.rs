use nalgebra::{DMatrix, DVector};

use super::hamiltonian::SparseMatrix;
use crate::linalg::eigh;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct DavidsonOptions {
    pub max_cycles: usize,
    /// Threshold on ‖Hv − e v‖.
    pub tol: f64,
    /// Subspace size that triggers a restart.
    pub max_subspace: usize,
    /// Problems up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            max_cycles: 200,
            tol: 1e-8,
            max_subspace: 25,
            dense_threshold: 64,
        }
    }
}

/// Symmetric operator interface used by the eigensolver.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn diagonal(&self) -> Vec<f64>;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn diagonal(&self) -> Vec<f64> {
        SparseMatrix::diagonal(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows()).map(|i| self[(i, i)]).collect()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = self * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Fix the overall sign so the largest-magnitude component is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
        }
    }
    if best < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Deterministic perturbation in [−1, 1) for component `i`.
fn jitter(i: usize) -> f64 {
    let mut z = (i as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn dense_lowest<A: SymmetricOperator>(a: &A) -> (f64, Vec<f64>) {
    let n = a.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        a.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    let m = (&m + m.transpose()) * 0.5;
    let (w, v) = eigh(&m);
    let mut x: Vec<f64> = v.column(0).iter().copied().collect();
    fix_sign(&mut x);
    (w[0], x)
}

/// Lowest eigenpair by block-size-one Davidson with a diagonal (Jacobi)
/// preconditioner. Returns (eigenvalue, unit eigenvector, cycles).
pub fn davidson_lowest<A: SymmetricOperator>(a: &A, opts: &DavidsonOptions) -> Result<(f64, Vec<f64>, usize)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    if n <= opts.dense_threshold {
        let (e, v) = dense_lowest(a);
        return Ok((e, v, 0));
    }
    let diag = a.diagonal();
    let start = (0..n)
        .min_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)))
        .unwrap();
    let mut v0: Vec<f64> = (0..n).map(|i| 1e-2 * jitter(i)).collect();
    v0[start] = 1.0;
    normalize(&mut v0);
    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut theta = f64::NAN;
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    for cycle in 1..=opts.max_cycles {
        while images.len() < basis.len() {
            let mut y = vec![0.0; n];
            a.apply(&basis[images.len()], &mut y);
            images.push(y);
        }
        let k = basis.len();
        let mut sub = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                sub[(i, j)] = v;
                sub[(j, i)] = v;
            }
        }
        let (w, s) = eigh(&sub);
        theta = w[0];
        x.iter_mut().for_each(|e| *e = 0.0);
        r.iter_mut().for_each(|e| *e = 0.0);
        for j in 0..k {
            let c = s[(j, 0)];
            for i in 0..n {
                x[i] += c * basis[j][i];
                r[i] += c * images[j][i];
            }
        }
        for i in 0..n {
            r[i] -= theta * x[i];
        }
        let rnorm = dot(&r, &r).sqrt();
        if rnorm < opts.tol {
            normalize(&mut x);
            fix_sign(&mut x);
            return Ok((theta, x, cycle));
        }
        let mut t: Vec<f64> = (0..n)
            .map(|i| {
                let d = theta - diag[i];
                let d = if d.abs() < 1e-8 { 1e-8f64.copysign(d) } else { d };
                r[i] / d
            })
            .collect();
        if k >= opts.max_subspace {
            let mut xr = x.clone();
            normalize(&mut xr);
            let mut ax = vec![0.0; n];
            for j in 0..k {
                let c = s[(j, 0)];
                for i in 0..n {
                    ax[i] += c * images[j][i];
                }
            }
            let nx = dot(&x, &x).sqrt();
            ax.iter_mut().for_each(|e| *e /= nx);
            basis = vec![xr];
            images = vec![ax];
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &t);
                for i in 0..n {
                    t[i] -= c * b[i];
                }
            }
        }
        if normalize(&mut t) < 1e-14 {
            // Preconditioned residual collapsed: fall back to the raw residual.
            t = r.clone();
            for b in &basis {
                let c = dot(b, &t);
                for i in 0..n {
                    t[i] -= c * b[i];
                }
            }
            if normalize(&mut t) < 1e-14 {
                normalize(&mut x);
                fix_sign(&mut x);
                return Ok((theta, x, cycle));
            }
        }
        basis.push(t);
    }
    Err(Error::NotConverged {
        method: "Davidson",
        iterations: opts.max_cycles,
        last_energy: theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let (e, v, _) = davidson_lowest(&m, &DavidsonOptions::default()).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
        assert!((v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iterative_path_on_diagonal() {
        let n = 100;
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { (i as f64 - 40.0).abs() } else { 0.0 });
        let opts = DavidsonOptions {
            dense_threshold: 0,
            ..Default::default()
        };
        let (e, v, _) = davidson_lowest(&m, &opts).unwrap();
        assert!(e.abs() < 1e-10);
        assert!((v[40] - 1.0).abs() < 1e-8);
    }
}
