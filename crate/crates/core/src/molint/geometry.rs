use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bohr per Ångström.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

const ELEMENTS: [(&str, u32); 9] = [
    ("H", 1),
    ("He", 2),
    ("Li", 3),
    ("Be", 4),
    ("C", 6),
    ("N", 7),
    ("O", 8),
    ("S", 16),
    ("Cl", 17),
];

/// Nuclear charge of a supported element symbol (case-insensitive).
pub fn nuclear_charge(symbol: &str) -> Result<u32> {
    ELEMENTS
        .iter()
        .find(|(s, _)| s.eq_ignore_ascii_case(symbol))
        .map(|&(_, z)| z)
        .ok_or_else(|| Error::UnknownElement(symbol.to_string()))
}

/// Canonical spelling of a supported element symbol.
pub fn canonical_symbol(symbol: &str) -> Result<&'static str> {
    ELEMENTS
        .iter()
        .find(|(s, _)| s.eq_ignore_ascii_case(symbol))
        .map(|&(s, _)| s)
        .ok_or_else(|| Error::UnknownElement(symbol.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthUnit {
    Angstrom,
    Bohr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub z: u32,
    /// Position in Bohr.
    pub position: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub charge: i32,
}

impl Molecule {
    /// Build and validate a molecule from `(symbol, position in Bohr)` pairs.
    pub fn new(atoms: Vec<(String, [f64; 3])>, charge: i32) -> Result<Self> {
        let mut out = Vec::with_capacity(atoms.len());
        for (sym, pos) in atoms {
            let symbol = canonical_symbol(&sym)?.to_string();
            let z = nuclear_charge(&symbol)?;
            out.push(Atom {
                symbol,
                z,
                position: pos,
            });
        }
        let mol = Molecule { atoms: out, charge };
        mol.validate()?;
        Ok(mol)
    }

    /// Convenience constructor taking positions in Ångström.
    pub fn from_angstrom(atoms: &[(&str, [f64; 3])], charge: i32) -> Result<Self> {
        Self::new(
            atoms
                .iter()
                .map(|(s, p)| {
                    (
                        s.to_string(),
                        [
                            p[0] * ANGSTROM_TO_BOHR,
                            p[1] * ANGSTROM_TO_BOHR,
                            p[2] * ANGSTROM_TO_BOHR,
                        ],
                    )
                })
                .collect(),
            charge,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::Geometry("no atoms".into()));
        }
        for a in &self.atoms {
            if a.position.iter().any(|x| !x.is_finite()) {
                return Err(Error::Geometry(format!("non-finite position for {}", a.symbol)));
            }
        }
        for i in 0..self.atoms.len() {
            for j in 0..i {
                if self.distance(i, j) <= 1e-6 {
                    return Err(Error::Geometry(format!("atoms {j} and {i} coincide")));
                }
            }
        }
        let total: i64 = self.atoms.iter().map(|a| a.z as i64).sum();
        if total - (self.charge as i64) < 0 {
            return Err(Error::Geometry("negative electron count".into()));
        }
        Ok(())
    }

    pub fn n_electrons(&self) -> usize {
        let total: i64 = self.atoms.iter().map(|a| a.z as i64).sum();
        (total - self.charge as i64) as usize
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let a = self.atoms[i].position;
        let b = self.atoms[j].position;
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Σ_{A<B} Z_A Z_B / R_AB in Hartree.
    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for i in 0..self.atoms.len() {
            for j in 0..i {
                e += (self.atoms[i].z * self.atoms[j].z) as f64 / self.distance(i, j);
            }
        }
        e
    }

    /// Rigid translation by `d` (Bohr).
    pub fn translated(&self, d: [f64; 3]) -> Molecule {
        let mut m = self.clone();
        for a in &mut m.atoms {
            for k in 0..3 {
                a.position[k] += d[k];
            }
        }
        m
    }

    /// Rigid rotation by the row-major 3×3 matrix `r`.
    pub fn rotated(&self, r: [[f64; 3]; 3]) -> Molecule {
        let mut m = self.clone();
        for a in &mut m.atoms {
            let p = a.position;
            for k in 0..3 {
                a.position[k] = r[k][0] * p[0] + r[k][1] * p[1] + r[k][2] * p[2];
            }
        }
        m
    }

    /// Geometry text in Ångström, one `symbol x y z` line per atom.
    pub fn to_angstrom_text(&self) -> String {
        let mut s = String::new();
        for a in &self.atoms {
            s.push_str(&format!(
                "{} {:.10} {:.10} {:.10}\n",
                a.symbol,
                a.position[0] / ANGSTROM_TO_BOHR,
                a.position[1] / ANGSTROM_TO_BOHR,
                a.position[2] / ANGSTROM_TO_BOHR
            ));
        }
        s
    }
}

/// Parse `symbol x y z` records separated by newlines, `;` or `/`.
pub fn parse_geometry(text: &str, unit: LengthUnit, charge: i32) -> Result<Molecule> {
    let scale = match unit {
        LengthUnit::Angstrom => ANGSTROM_TO_BOHR,
        LengthUnit::Bohr => 1.0,
    };
    let mut atoms = Vec::new();
    for rec in text.split(['\n', ';', '/']) {
        let rec = rec.trim();
        if rec.is_empty() || rec.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = rec.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Geometry(format!("malformed line `{rec}`")));
        }
        let sym = canonical_symbol(fields[0])?;
        let mut pos = [0.0; 3];
        for k in 0..3 {
            pos[k] = fields[k + 1]
                .parse::<f64>()
                .map_err(|_| Error::Geometry(format!("bad coordinate `{}`", fields[k + 1])))?
                * scale;
        }
        atoms.push((sym.to_string(), pos));
    }
    if atoms.is_empty() {
        return Err(Error::Geometry("empty geometry".into()));
    }
    Molecule::new(atoms, charge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_h2_angstrom() {
        let m = parse_geometry(
            "H -8.0563 4.7154 0.0 / H -8.5983 4.7845 -0.3333",
            LengthUnit::Angstrom,
            0,
        )
        .unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.n_electrons(), 2);
        assert!((m.atoms[0].position[0] + 8.0563 * ANGSTROM_TO_BOHR).abs() < 1e-12);
    }

    #[test]
    fn parses_cation() {
        let m = parse_geometry("He 0 0 0\nH 0 0 0.5500", LengthUnit::Angstrom, 1).unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.n_electrons(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_geometry("", LengthUnit::Bohr, 0).is_err());
        assert!(parse_geometry("Xe 0 0 0", LengthUnit::Bohr, 0).is_err());
        assert!(parse_geometry("H 0 0", LengthUnit::Bohr, 0).is_err());
        assert!(parse_geometry("H 0 0 0; H 0 0 0", LengthUnit::Bohr, 0).is_err());
    }

    #[test]
    fn nuclear_repulsion_h2() {
        let m = parse_geometry("H 0 0 0; H 0 0 1.4", LengthUnit::Bohr, 0).unwrap();
        assert!((m.nuclear_repulsion() - 1.0 / 1.4).abs() < 1e-15);
    }
}
