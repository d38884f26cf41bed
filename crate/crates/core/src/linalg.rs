//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix with eigenvalues sorted
/// ascending. Each eigenvector is signed so that its largest-magnitude
/// component is positive, which keeps results reproducible.
pub fn eigh(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut w = DVector::zeros(n);
    let mut v = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        w[k] = eig.eigenvalues[i];
        let mut col = eig.eigenvectors.column(i).clone_owned();
        let mut best = 0;
        for r in 0..n {
            if col[r].abs() > col[best].abs() + 1e-12 {
                best = r;
            }
        }
        if col[best] < 0.0 {
            col = -col;
        }
        v.set_column(k, &col);
    }
    (w, v)
}

/// Symmetric inverse square root `S^{-1/2}`; fails when `S` is not
/// positive definite beyond `min_eig`.
pub fn inv_sqrt(s: &DMatrix<f64>, min_eig: f64) -> Result<DMatrix<f64>> {
    let (w, v) = eigh(s);
    if w[0] <= min_eig {
        return Err(Error::Invalid(format!(
            "matrix not positive definite (smallest eigenvalue {:.3e})",
            w[0]
        )));
    }
    let d = DMatrix::from_diagonal(&w.map(|x| 1.0 / x.sqrt()));
    Ok(&v * d * v.transpose())
}

/// Largest absolute element.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Dense 4-index tensor stored row-major, used for small active spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    pub dims: [usize; 4],
    pub data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dims: [usize; 4]) -> Self {
        Self {
            dims,
            data: vec![0.0; dims[0] * dims[1] * dims[2] * dims[3]],
        }
    }

    pub fn cube(n: usize) -> Self {
        Self::zeros([n; 4])
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dims[1] + j) * self.dims[2] + k) * self.dims[3] + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let x = self.idx(i, j, k, l);
        self.data[x] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let x = self.idx(i, j, k, l);
        self.data[x] += v;
    }
}

/// Pulay DIIS extrapolation over flattened vectors.
#[derive(Clone, Debug)]
pub struct Diis {
    depth: usize,
    vecs: Vec<Vec<f64>>,
    errs: Vec<Vec<f64>>,
}

impl Diis {
    pub fn new(depth: usize) -> Self {
        Self {
            depth: depth.max(1),
            vecs: Vec::new(),
            errs: Vec::new(),
        }
    }

    /// Store `(vec, err)` and return the extrapolated vector.
    pub fn extrapolate(&mut self, vec: Vec<f64>, err: Vec<f64>) -> Vec<f64> {
        if self.vecs.len() == self.depth {
            self.vecs.remove(0);
            self.errs.remove(0);
        }
        self.vecs.push(vec);
        self.errs.push(err);
        let m = self.vecs.len();
        if m < 2 {
            return self.vecs[m - 1].clone();
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let d: f64 = self.errs[i]
                    .iter()
                    .zip(&self.errs[j])
                    .map(|(x, y)| x * y)
                    .sum();
                b[(i, j)] = d;
                b[(j, i)] = d;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let scale = (0..m).map(|i| b[(i, i)]).fold(0.0f64, f64::max);
        if scale > 0.0 {
            for i in 0..m {
                for j in 0..m {
                    b[(i, j)] /= scale;
                }
            }
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let coef = match b.clone().lu().solve(&rhs) {
            Some(c) if c.iter().all(|x| x.is_finite()) => c,
            _ => {
                // Singular B: drop the oldest entries and return the newest vector.
                let last = self.vecs[m - 1].clone();
                let lerr = self.errs[m - 1].clone();
                self.vecs = vec![last.clone()];
                self.errs = vec![lerr];
                return last;
            }
        };
        let len = self.vecs[0].len();
        let mut out = vec![0.0; len];
        for (i, v) in self.vecs.iter().enumerate() {
            let c = coef[i];
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorted_and_orthonormal() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let (w, v) = eigh(&a);
        assert!(w[0] <= w[1] && w[1] <= w[2]);
        let r = &a * &v - &v * DMatrix::from_diagonal(&w);
        assert!(max_abs(&r) < 1e-12);
        let o = v.transpose() * &v - DMatrix::identity(3, 3);
        assert!(max_abs(&o) < 1e-12);
    }

    #[test]
    fn inv_sqrt_identity() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let x = inv_sqrt(&s, 1e-10).unwrap();
        let e = x.transpose() * &s * &x - DMatrix::identity(2, 2);
        assert!(max_abs(&e) < 1e-12);
    }
}
