//! Scan geometries: tabulated 1D bond-length lists and the symmetric H₂O
//! (r, θ) grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::molint::{BasisName, Molecule};
use crate::{Error, Result};

const R_H2: [f64; 25] = [
    0.3000, 0.3627, 0.4255, 0.4882, 0.5509, 0.6137, 0.6764, 0.7391, 0.8019, 0.8646, 0.9273, 0.9901, 1.0528, 1.1155,
    1.1783, 1.2410, 1.5854, 1.9299, 2.2743, 2.6188, 2.9632, 3.3077, 3.6521, 3.9966, 4.3410,
];

const R_HEH_STO3G: [f64; 25] = [
    0.5500, 0.5983, 0.6465, 0.6948, 0.7431, 0.7913, 0.8396, 0.8879, 0.9361, 0.9844, 1.0327, 1.0809, 1.1292, 1.1775,
    1.2257, 1.2740, 1.5851, 1.8962, 2.2073, 2.5184, 2.8296, 3.1407, 3.4518, 3.7629, 4.0740,
];

const R_HEH_631G: [f64; 25] = [
    0.4500, 0.5049, 0.5599, 0.6148, 0.6697, 0.7247, 0.7796, 0.8345, 0.8895, 0.9444, 0.9993, 1.0543, 1.1092, 1.1641,
    1.2191, 1.2740, 1.5851, 1.8962, 2.2073, 2.5184, 2.8296, 3.1407, 3.4518, 3.7629, 4.0740,
];

const R_LIH: [f64; 30] = [
    0.8000, 0.8592, 0.9184, 0.9776, 1.0368, 1.0960, 1.1627, 1.2293, 1.2960, 1.3627, 1.4293, 1.4960, 1.5627, 1.6293,
    1.6960, 1.7627, 1.8293, 1.8960, 1.9627, 2.0293, 2.0960, 2.4404, 2.7849, 3.1293, 3.4738, 3.8182, 4.1627, 4.5071,
    4.8516, 5.1960,
];

const R_BEH2: [f64; 27] = [
    0.7200, 0.7428, 0.7656, 0.7884, 0.8112, 0.8340, 0.9007, 0.9673, 1.0340, 1.1007, 1.1673, 1.2340, 1.3007, 1.3673,
    1.4340, 1.5007, 1.5673, 1.6340, 1.7007, 1.7673, 1.8340, 2.0718, 2.3096, 2.5473, 2.7851, 3.0229, 3.4984,
];

/// Molecules with a scan parameterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanMolecule {
    H2,
    HeHPlus,
    LiH,
    BeH2,
    H2O,
}

impl ScanMolecule {
    pub fn charge(self) -> i32 {
        match self {
            ScanMolecule::HeHPlus => 1,
            _ => 0,
        }
    }

    /// Tabulated bond lengths (Å), if any exist for this basis.
    pub fn default_r_list(self, basis: BasisName) -> Option<&'static [f64]> {
        match (self, basis) {
            (ScanMolecule::H2, BasisName::Sto3g | BasisName::B631g) => Some(&R_H2),
            (ScanMolecule::HeHPlus, BasisName::Sto3g) => Some(&R_HEH_STO3G),
            (ScanMolecule::HeHPlus, BasisName::B631g) => Some(&R_HEH_631G),
            (ScanMolecule::LiH, BasisName::Sto3g) => Some(&R_LIH),
            (ScanMolecule::BeH2, BasisName::Sto3g) => Some(&R_BEH2),
            _ => None,
        }
    }

    /// Geometry at bond length `r` (Å) and, for H₂O, bond angle `theta` (degrees).
    pub fn geometry(self, r: f64, theta: Option<f64>) -> Result<Molecule> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Geometry(format!("bond length {r}")));
        }
        let z = |s: &'static str, z: f64| (s, [0.0, 0.0, z]);
        let atoms = match self {
            ScanMolecule::H2 => vec![z("H", 0.0), z("H", r)],
            ScanMolecule::HeHPlus => vec![z("He", 0.0), z("H", r)],
            ScanMolecule::LiH => vec![z("Li", 0.0), z("H", r)],
            ScanMolecule::BeH2 => vec![z("Be", 0.0), z("H", r), z("H", -r)],
            ScanMolecule::H2O => {
                let t = theta.ok_or_else(|| Error::Geometry("H2O needs a bond angle".into()))?;
                let half = 0.5 * t.to_radians();
                let (s, c) = half.sin_cos();
                vec![("O", [0.0, 0.0, 0.0]), ("H", [r * s, 0.0, r * c]), ("H", [-r * s, 0.0, r * c])]
            }
        };
        Molecule::from_angstrom(&atoms, self.charge())
    }
}

impl fmt::Display for ScanMolecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanMolecule::H2 => "H2",
            ScanMolecule::HeHPlus => "HeH+",
            ScanMolecule::LiH => "LiH",
            ScanMolecule::BeH2 => "BeH2",
            ScanMolecule::H2O => "H2O",
        })
    }
}

impl FromStr for ScanMolecule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "h2" => Ok(ScanMolecule::H2),
            "heh+" | "hehp" | "heh" => Ok(ScanMolecule::HeHPlus),
            "lih" => Ok(ScanMolecule::LiH),
            "beh2" => Ok(ScanMolecule::BeH2),
            "h2o" => Ok(ScanMolecule::H2O),
            other => Err(Error::Invalid(format!("no scan parameterization for `{other}`"))),
        }
    }
}

/// Inclusive uniform axis with `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, n: usize) -> Self {
        Self { start, stop, n }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.n - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.n < 2 || !self.start.is_finite() || !self.stop.is_finite() || self.stop <= self.start {
            return Err(Error::Invalid(format!(
                "{what} axis [{}, {}] with {} points",
                self.start, self.stop, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    /// The tabulated bond-length list for the molecule and basis.
    Table,
    /// Explicit bond lengths in Å.
    Explicit(Vec<f64>),
    /// Uniform (r, θ) grid; `stride` keeps every stride-th node on each
    /// axis while preserving the full-grid index k = i_r·n_θ + i_θ.
    Grid2D { r: Axis, theta: Axis, stride: usize },
}

impl GridSpec {
    /// The 32 × 32 H₂O surface on [0.85, 1.20] Å × [85°, 115°].
    pub fn h2o_full() -> Self {
        GridSpec::Grid2D {
            r: Axis::new(0.85, 1.20, 32),
            theta: Axis::new(85.0, 115.0, 32),
            stride: 1,
        }
    }

    /// Every fourth node of [`GridSpec::h2o_full`]: 8 × 8 points.
    pub fn h2o_sub8() -> Self {
        match Self::h2o_full() {
            GridSpec::Grid2D { r, theta, .. } => GridSpec::Grid2D { r, theta, stride: 4 },
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub k: usize,
    pub r: f64,
    pub theta: Option<f64>,
    pub molecule: Molecule,
}

/// Ordered scan geometries; a pure function of its arguments.
pub fn generate_grid(mol: ScanMolecule, basis: BasisName, spec: &GridSpec) -> Result<Vec<GridPoint>> {
    let one_d = |rs: &[f64]| -> Result<Vec<GridPoint>> {
        if mol == ScanMolecule::H2O {
            return Err(Error::Invalid("H2O scans need a 2D grid".into()));
        }
        if rs.is_empty() {
            return Err(Error::Invalid("empty bond-length list".into()));
        }
        rs.iter()
            .enumerate()
            .map(|(k, &r)| {
                Ok(GridPoint {
                    k,
                    r,
                    theta: None,
                    molecule: mol.geometry(r, None)?,
                })
            })
            .collect()
    };
    match spec {
        GridSpec::Table => {
            let rs = mol
                .default_r_list(basis)
                .ok_or_else(|| Error::Invalid(format!("no tabulated grid for {mol}/{basis}")))?;
            one_d(rs)
        }
        GridSpec::Explicit(rs) => one_d(rs),
        GridSpec::Grid2D { r, theta, stride } => {
            if mol != ScanMolecule::H2O {
                return Err(Error::Invalid(format!("2D grids are defined for H2O only, not {mol}")));
            }
            r.validate("r")?;
            theta.validate("theta")?;
            if *stride == 0 {
                return Err(Error::Invalid("grid stride must be at least 1".into()));
            }
            let mut out = Vec::new();
            for i in (0..r.n).step_by(*stride) {
                for j in (0..theta.n).step_by(*stride) {
                    let (rv, tv) = (r.value(i), theta.value(j));
                    out.push(GridPoint {
                        k: i * theta.n + j,
                        r: rv,
                        theta: Some(tv),
                        molecule: mol.geometry(rv, Some(tv))?,
                    });
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molint::ANGSTROM_TO_BOHR;

    #[test]
    fn h2o_full_grid() {
        let g = generate_grid(ScanMolecule::H2O, BasisName::Sto3g, &GridSpec::h2o_full()).unwrap();
        assert_eq!(g.len(), 1024);
        assert_eq!(g[0].k, 0);
        assert_eq!(g[1023].k, 1023);
        assert!((g[1].theta.unwrap() - 85.0 - 30.0 / 31.0).abs() < 1e-12);
        assert!((g[32].r - 0.85 - 0.35 / 31.0).abs() < 1e-12);
        let sub = generate_grid(ScanMolecule::H2O, BasisName::Sto3g, &GridSpec::h2o_sub8()).unwrap();
        assert_eq!(sub.len(), 64);
        assert_eq!(sub[1].k, 4);
        assert_eq!(sub[8].k, 128);
    }

    #[test]
    fn right_angle_geometry() {
        let m = ScanMolecule::H2O.geometry(1.0, Some(90.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2 * ANGSTROM_TO_BOHR;
        let h1 = m.atoms[1].position;
        let h2 = m.atoms[2].position;
        assert!((h1[0] - s).abs() < 1e-12 && h1[1] == 0.0 && (h1[2] - s).abs() < 1e-12);
        assert!((h2[0] + s).abs() < 1e-12 && (h2[2] - s).abs() < 1e-12);
    }

    #[test]
    fn tabulated_lists() {
        let g = generate_grid(ScanMolecule::H2, BasisName::Sto3g, &GridSpec::Table).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0].r, 0.3);
        assert_eq!(g[24].r, 4.341);
        let b = generate_grid(ScanMolecule::BeH2, BasisName::Sto3g, &GridSpec::Table).unwrap();
        let m = &b[3].molecule;
        assert_eq!(m.atoms[1].position[2], -m.atoms[2].position[2]);
        assert_eq!(m.atoms[0].symbol, "Be");
        assert_eq!(ScanMolecule::LiH.default_r_list(BasisName::Sto3g).unwrap().len(), 30);
        assert!(ScanMolecule::LiH.default_r_list(BasisName::B631g).is_none());
        assert_eq!(generate_grid(ScanMolecule::HeHPlus, BasisName::B631g, &GridSpec::Table).unwrap()[0].r, 0.45);
    }

    #[test]
    fn invalid_specs() {
        let bad = GridSpec::Grid2D {
            r: Axis::new(1.2, 0.85, 32),
            theta: Axis::new(85.0, 115.0, 32),
            stride: 1,
        };
        assert!(generate_grid(ScanMolecule::H2O, BasisName::Sto3g, &bad).is_err());
        assert!(generate_grid(ScanMolecule::H2, BasisName::Sto3g, &GridSpec::Explicit(vec![])).is_err());
        assert!(generate_grid(ScanMolecule::H2, BasisName::Sto3g, &GridSpec::Explicit(vec![-1.0])).is_err());
        assert!(generate_grid(ScanMolecule::H2, BasisName::Sto3g, &GridSpec::h2o_full()).is_err());
    }
}
