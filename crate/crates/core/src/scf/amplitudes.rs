//! Cluster amplitudes in the closed-shell spatial layout.
//!
//! `t2[i,j,a,b]` is the opposite-spin amplitude t(iα jβ → aα bβ); `i, j`
//! index occupied and `a, b` virtual orbitals, virtuals counted from zero.
//! Same-spin amplitudes follow as t2[i,j,a,b] − t2[i,j,b,a]. Every consumer
//! goes through [`Amplitudes::t2_spin`] for spin-orbital values.
//!
//! Spin orbitals are interleaved: spatial p with spin σ (0 = α, 1 = β) is
//! `2p + σ`, separately within the occupied and virtual blocks.
//!
//! Exchange file (`format = "sqdlab-amplitudes-v1"`): `n_occ`, `n_virt`,
//! `source`, row-major `t1` (n_occ·n_virt) and `t2` (n_occ²·n_virt²).

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::Tensor4;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeSource {
    Mp2,
    Ccsd,
    External,
}

#[derive(Clone, Debug)]
pub struct Amplitudes {
    pub n_occ: usize,
    pub n_virt: usize,
    pub t1: DMatrix<f64>,
    pub t2: Tensor4,
    pub source: AmplitudeSource,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeFile {
    format: String,
    n_occ: usize,
    n_virt: usize,
    source: AmplitudeSource,
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl Amplitudes {
    pub fn zeros(n_occ: usize, n_virt: usize, source: AmplitudeSource) -> Self {
        Self {
            n_occ,
            n_virt,
            t1: DMatrix::zeros(n_occ, n_virt),
            t2: Tensor4::zeros([n_occ, n_occ, n_virt, n_virt]),
            source,
        }
    }

    /// Spin-orbital t1 for interleaved indices.
    pub fn t1_spin(&self, i: usize, a: usize) -> f64 {
        if i % 2 != a % 2 {
            return 0.0;
        }
        self.t1[(i / 2, a / 2)]
    }

    /// Spin-orbital t2 (antisymmetric in i↔j and a↔b) for interleaved indices.
    pub fn t2_spin(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        let (si, sj, sa, sb) = (i % 2, j % 2, a % 2, b % 2);
        let (i, j, a, b) = (i / 2, j / 2, a / 2, b / 2);
        let t = |a: usize, b: usize| self.t2.get(i, j, a, b);
        if si == sj {
            if sa == si && sb == si {
                t(a, b) - t(b, a)
            } else {
                0.0
            }
        } else if sa == si && sb == sj {
            t(a, b)
        } else if sa == sj && sb == si {
            -t(b, a)
        } else {
            0.0
        }
    }

    /// Largest deviation from the pair symmetry t2[i,j,a,b] = t2[j,i,b,a].
    pub fn pair_symmetry_error(&self) -> f64 {
        let (o, v) = (self.n_occ, self.n_virt);
        let mut err: f64 = 0.0;
        for i in 0..o {
            for j in 0..o {
                for a in 0..v {
                    for b in 0..v {
                        err = err.max((self.t2.get(i, j, a, b) - self.t2.get(j, i, b, a)).abs());
                    }
                }
            }
        }
        err
    }

    pub fn to_json(&self) -> Result<String> {
        let mut t1 = Vec::with_capacity(self.n_occ * self.n_virt);
        for i in 0..self.n_occ {
            for a in 0..self.n_virt {
                t1.push(self.t1[(i, a)]);
            }
        }
        let f = AmplitudeFile {
            format: "sqdlab-amplitudes-v1".into(),
            n_occ: self.n_occ,
            n_virt: self.n_virt,
            source: self.source,
            t1,
            t2: self.t2.data.clone(),
        };
        Ok(serde_json::to_string(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: AmplitudeFile = serde_json::from_str(text)?;
        if f.format != "sqdlab-amplitudes-v1" {
            return Err(Error::Invalid(format!("unknown amplitude format `{}`", f.format)));
        }
        let (o, v) = (f.n_occ, f.n_virt);
        if f.t1.len() != o * v || f.t2.len() != o * o * v * v {
            return Err(Error::Dimension("amplitude array length".into()));
        }
        let mut t2 = Tensor4::zeros([o, o, v, v]);
        t2.data = f.t2;
        Ok(Self {
            n_occ: o,
            n_virt: v,
            t1: DMatrix::from_row_slice(o, v, &f.t1),
            t2,
            source: f.source,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_accessor_antisymmetry() {
        let mut amp = Amplitudes::zeros(2, 2, AmplitudeSource::External);
        let mut x = 0.1;
        for v in amp.t2.data.iter_mut() {
            *v = x;
            x += 0.37;
            x %= 1.0;
        }
        // Enforce the spatial pair symmetry.
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = amp.t2.get(i, j, a, b);
                        amp.t2.set(j, i, b, a, v);
                    }
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        let t = amp.t2_spin(i, j, a, b);
                        assert!((t + amp.t2_spin(j, i, a, b)).abs() < 1e-14);
                        assert!((t + amp.t2_spin(i, j, b, a)).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mut amp = Amplitudes::zeros(1, 2, AmplitudeSource::Ccsd);
        amp.t1[(0, 1)] = 0.25;
        amp.t2.set(0, 0, 1, 0, -0.125);
        let back = Amplitudes::from_json(&amp.to_json().unwrap()).unwrap();
        assert_eq!(back.t1, amp.t1);
        assert_eq!(back.t2.data, amp.t2.data);
        assert_eq!(back.source, AmplitudeSource::Ccsd);
    }
}
