//! The raw AO integral layer and its JSON interchange file.
//!
//! File layout (`format = "sqdlab-aobundle-v1"`): `n_ao`, row-major `s` and
//! `hcore` (n_ao² floats each), `eri` as the packed 8-fold array indexed by
//! [`super::eri::quartet_index`], `e_nuc`, and `ao_atom_map`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::eri::{packed_len, PackedEri};
use crate::linalg::eigh;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct AOBundle {
    pub n_ao: usize,
    pub s: DMatrix<f64>,
    pub hcore: DMatrix<f64>,
    /// Kinetic part of `hcore` when produced by the built-in engine.
    pub kinetic: Option<DMatrix<f64>>,
    pub eri: PackedEri,
    pub e_nuc: f64,
    pub ao_atom_map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    format: String,
    n_ao: usize,
    s: Vec<f64>,
    hcore: Vec<f64>,
    eri: Vec<f64>,
    e_nuc: f64,
    ao_atom_map: Vec<usize>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

impl AOBundle {
    /// Check symmetry, positive definiteness of S and array sizes.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_ao;
        if self.s.shape() != (n, n) || self.hcore.shape() != (n, n) {
            return Err(Error::Dimension("S/hcore shape".into()));
        }
        if self.eri.n != n || self.eri.data.len() != packed_len(n) {
            return Err(Error::Dimension("packed eri length".into()));
        }
        if self.ao_atom_map.len() != n {
            return Err(Error::Dimension("ao_atom_map length".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (self.s[(i, j)] - self.s[(j, i)]).abs() > 1e-10
                    || (self.hcore[(i, j)] - self.hcore[(j, i)]).abs() > 1e-10
                {
                    return Err(Error::Invalid("S or hcore not symmetric".into()));
                }
            }
        }
        let (w, _) = eigh(&self.s);
        if n > 0 && w[0] <= 1e-10 {
            return Err(Error::Invalid(format!("overlap not positive definite ({:.3e})", w[0])));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let f = BundleFile {
            format: "sqdlab-aobundle-v1".into(),
            n_ao: self.n_ao,
            s: row_major(&self.s),
            hcore: row_major(&self.hcore),
            eri: self.eri.data.clone(),
            e_nuc: self.e_nuc,
            ao_atom_map: self.ao_atom_map.clone(),
        };
        Ok(serde_json::to_string(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: BundleFile = serde_json::from_str(text)?;
        if f.format != "sqdlab-aobundle-v1" {
            return Err(Error::Invalid(format!("unknown bundle format `{}`", f.format)));
        }
        let n = f.n_ao;
        if f.s.len() != n * n || f.hcore.len() != n * n {
            return Err(Error::Dimension("matrix length".into()));
        }
        let b = AOBundle {
            n_ao: n,
            s: DMatrix::from_row_slice(n, n, &f.s),
            hcore: DMatrix::from_row_slice(n, n, &f.hcore),
            kinetic: None,
            eri: PackedEri { n, data: f.eri },
            e_nuc: f.e_nuc,
            ao_atom_map: f.ao_atom_map,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
