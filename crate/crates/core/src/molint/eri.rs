//! Two-electron integrals (μν|λσ) packed with 8-fold permutational symmetry.

use serde::{Deserialize, Serialize};

/// Canonical index of an unordered pair.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

/// Canonical index of the quartet (ij|kl) over pair indices.
#[inline]
pub fn quartet_index(i: usize, j: usize, k: usize, l: usize) -> usize {
    pair_index(pair_index(i, j), pair_index(k, l))
}

/// Number of packed elements for `n` orbitals.
pub fn packed_len(n: usize) -> usize {
    let np = n * (n + 1) / 2;
    np * (np + 1) / 2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackedEri {
    pub n: usize,
    pub data: Vec<f64>,
}

impl PackedEri {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; packed_len(n)],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[quartet_index(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let x = quartet_index(i, j, k, l);
        self.data[x] = v;
    }

    /// Expand to a dense row-major n⁴ array.
    pub fn unpack(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// Pack a dense n⁴ array, averaging over the 8 symmetry-equivalent
    /// positions. Returns the largest deviation from 8-fold symmetry.
    pub fn from_dense(n: usize, dense: &[f64]) -> (Self, f64) {
        assert_eq!(dense.len(), n * n * n * n);
        let at = |i: usize, j: usize, k: usize, l: usize| dense[((i * n + j) * n + k) * n + l];
        let mut out = Self::zeros(n);
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if pair_index(i, j) < pair_index(k, l) {
                            continue;
                        }
                        let vals = [
                            at(i, j, k, l),
                            at(j, i, k, l),
                            at(i, j, l, k),
                            at(j, i, l, k),
                            at(k, l, i, j),
                            at(l, k, i, j),
                            at(k, l, j, i),
                            at(l, k, j, i),
                        ];
                        let mean = if vals.iter().all(|&x| x == vals[0]) {
                            vals[0]
                        } else {
                            vals.iter().sum::<f64>() / 8.0
                        };
                        for v in vals {
                            dev = dev.max((v - mean).abs());
                        }
                        out.set(i, j, k, l, mean);
                    }
                }
            }
        }
        (out, dev)
    }
}
