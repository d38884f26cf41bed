use std::io::Write;

use nalgebra::DMatrix;

use super::det::{bits, excitation_sign, low_bits, Determinant};
use super::space::DetSpace;
use crate::par;
use crate::scf::MOIntegrals;
use crate::{Error, Result};

/// Symmetric matrix in compressed sparse row form with full rows.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable_by_key(|e| e.0);
            for (c, v) in r {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .filter(|&j| m[(i, j)] != 0.0)
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// y = A x, parallel over rows.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        par::fill(y, |i| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            s
        });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }

    /// Largest |A_ij − A_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                e = e.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        e
    }

    /// Debug dump: one `i j value` line per stored element (0-based).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# n={} nnz={}", self.n, self.nnz())?;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(w, "{} {} {:.17e}", i, self.col_idx[k], self.values[k])?;
            }
        }
        Ok(())
    }
}

/// Dense MO integrals with fast Slater–Condon kernels.
pub struct SlaterCondon {
    pub n: usize,
    h1: Vec<f64>,
    eri: Vec<f64>,
    j: Vec<f64>,
    k: Vec<f64>,
}

impl SlaterCondon {
    pub fn new(mo: &MOIntegrals) -> Self {
        let n = mo.n_orb;
        let eri = mo.eri_dense();
        let mut h1 = vec![0.0; n * n];
        let mut j = vec![0.0; n * n];
        let mut k = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                h1[p * n + q] = mo.h1[(p, q)];
                j[p * n + q] = eri[((p * n + p) * n + q) * n + q];
                k[p * n + q] = eri[((p * n + q) * n + q) * n + p];
            }
        }
        Self { n, h1, eri, j, k }
    }

    /// Chemist-notation (pq|rs).
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.eri[((p * n + q) * n + r) * n + s]
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n + q]
    }

    pub fn diagonal(&self, d: &Determinant) -> f64 {
        let n = self.n;
        let mut e = 0.0;
        for (same, other) in [(d.alpha, d.beta), (d.beta, d.alpha)] {
            for i in bits(same) {
                e += self.h1[i * n + i];
                for j in bits(same) {
                    e += 0.5 * (self.j[i * n + j] - self.k[i * n + j]);
                }
                for j in bits(other) {
                    e += 0.5 * self.j[i * n + j];
                }
            }
        }
        e
    }

    /// ⟨D_i^a|H|D⟩ for a same-spin single, without the permutation sign.
    #[inline]
    fn single(&self, same: u32, other: u32, i: usize, a: usize) -> f64 {
        let mut v = self.h(a, i);
        for k in bits(same) {
            v += self.g(a, i, k, k) - self.g(a, k, k, i);
        }
        for k in bits(other) {
            v += self.g(a, i, k, k);
        }
        v
    }

    /// ⟨D'|H|D⟩ for any pair of determinants (zero beyond doubles).
    pub fn element(&self, bra: &Determinant, ket: &Determinant) -> f64 {
        let da = bra.alpha ^ ket.alpha;
        let db = bra.beta ^ ket.beta;
        let na = da.count_ones();
        let nb = db.count_ones();
        match (na, nb) {
            (0, 0) => self.diagonal(ket),
            (2, 0) => {
                let i = (da & ket.alpha).trailing_zeros() as usize;
                let a = (da & bra.alpha).trailing_zeros() as usize;
                excitation_sign(ket.alpha, i, a) * self.single(ket.alpha, ket.beta, i, a)
            }
            (0, 2) => {
                let i = (db & ket.beta).trailing_zeros() as usize;
                let a = (db & bra.beta).trailing_zeros() as usize;
                excitation_sign(ket.beta, i, a) * self.single(ket.beta, ket.alpha, i, a)
            }
            (4, 0) => self.same_spin_double(ket.alpha, da, bra.alpha),
            (0, 4) => self.same_spin_double(ket.beta, db, bra.beta),
            (2, 2) => {
                let i = (da & ket.alpha).trailing_zeros() as usize;
                let a = (da & bra.alpha).trailing_zeros() as usize;
                let j = (db & ket.beta).trailing_zeros() as usize;
                let b = (db & bra.beta).trailing_zeros() as usize;
                excitation_sign(ket.alpha, i, a) * excitation_sign(ket.beta, j, b) * self.g(a, i, b, j)
            }
            _ => 0.0,
        }
    }

    fn same_spin_double(&self, ket: u32, diff: u32, bra: u32) -> f64 {
        let mut occ = bits(diff & ket);
        let (i, j) = (occ.next().unwrap(), occ.next().unwrap());
        let mut vir = bits(diff & bra);
        let (a, b) = (vir.next().unwrap(), vir.next().unwrap());
        let s1 = excitation_sign(ket, i, a);
        let mid = ket ^ (1 << i) ^ (1 << a);
        let s2 = excitation_sign(mid, j, b);
        s1 * s2 * (self.g(a, i, b, j) - self.g(a, j, b, i))
    }
}

/// Determinants connected to `d` by single and double excitations that
/// belong to `space`, with their matrix elements (diagonal included).
fn connected_row(sc: &SlaterCondon, space: &DetSpace, d: &Determinant) -> Vec<(usize, f64)> {
    let mask = low_bits(space.n_orb);
    let mut row = Vec::new();
    let push = |e: Determinant, row: &mut Vec<(usize, f64)>| {
        if let Some(j) = space.position(&e) {
            let v = sc.element(&e, d);
            if v != 0.0 {
                row.push((j, v));
            }
        }
    };
    push(*d, &mut row);
    let (va, vb) = (!d.alpha & mask, !d.beta & mask);
    for i in bits(d.alpha) {
        for a in bits(va) {
            push(Determinant::new(d.alpha ^ (1 << i) ^ (1 << a), d.beta), &mut row);
        }
    }
    for i in bits(d.beta) {
        for a in bits(vb) {
            push(Determinant::new(d.alpha, d.beta ^ (1 << i) ^ (1 << a)), &mut row);
        }
    }
    for (occ, vir, alpha) in [(d.alpha, va, true), (d.beta, vb, false)] {
        for i in bits(occ) {
            for j in bits(occ).filter(|&j| j > i) {
                for a in bits(vir) {
                    for b in bits(vir).filter(|&b| b > a) {
                        let x = (1 << i) ^ (1 << j) ^ (1 << a) ^ (1 << b);
                        let e = if alpha {
                            Determinant::new(d.alpha ^ x, d.beta)
                        } else {
                            Determinant::new(d.alpha, d.beta ^ x)
                        };
                        push(e, &mut row);
                    }
                }
            }
        }
    }
    for i in bits(d.alpha) {
        for a in bits(va) {
            let na = d.alpha ^ (1 << i) ^ (1 << a);
            for j in bits(d.beta) {
                for b in bits(vb) {
                    push(Determinant::new(na, d.beta ^ (1 << j) ^ (1 << b)), &mut row);
                }
            }
        }
    }
    row
}

/// H_sub[i,j] = ⟨x_i|H|x_j⟩ without the core energy.
pub fn build_subspace_hamiltonian(space: &DetSpace, mo: &MOIntegrals) -> Result<SparseMatrix> {
    if space.is_empty() {
        return Err(Error::Invalid("empty determinant space".into()));
    }
    if mo.n_orb != space.n_orb {
        return Err(Error::Dimension(format!(
            "space has {} orbitals, integrals have {}",
            space.n_orb, mo.n_orb
        )));
    }
    let sc = SlaterCondon::new(mo);
    let rows = par::map_slice(&space.dets, |d| connected_row(&sc, space, d));
    Ok(SparseMatrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_excitation_is_zero() {
        let n = 4;
        let mut h2 = crate::molint::eri::PackedEri::zeros(n);
        for (x, v) in h2.data.iter_mut().enumerate() {
            *v = 0.01 * (x as f64).sin();
        }
        let mo = MOIntegrals {
            n_orb: n,
            h1: DMatrix::from_fn(n, n, |i, j| 0.1 * (i + j) as f64),
            h2,
            e_core: 0.0,
        };
        let sc = SlaterCondon::new(&mo);
        let a = Determinant::new(0b0011, 0b0001);
        let b = Determinant::new(0b1100, 0b0010);
        assert_eq!(sc.element(&b, &a), 0.0);
    }
}
