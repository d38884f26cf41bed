//! Contracted Gaussian basis data. Exponents and contraction coefficients are
//! the standard published STO-3G and 6-31G values, shipped in
//! `data/basis.json` together with the leading ANO valence contractions used
//! for meta-Löwdin pre-orthogonalization.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::geometry::Molecule;
use crate::{Error, Result};

const BASIS_JSON: &str = include_str!("../../data/basis.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisName {
    #[serde(rename = "sto-3g")]
    Sto3g,
    #[serde(rename = "6-31g")]
    B631g,
    /// Leading atomic-natural-orbital contractions; only used as a projection
    /// target when building localized orbitals.
    #[serde(rename = "ano-valence")]
    AnoValence,
}

impl BasisName {
    pub fn key(self) -> &'static str {
        match self {
            BasisName::Sto3g => "sto-3g",
            BasisName::B631g => "6-31g",
            BasisName::AnoValence => "ano-valence",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sto-3g" | "sto3g" => Ok(BasisName::Sto3g),
            "6-31g" | "631g" => Ok(BasisName::B631g),
            other => Err(Error::Basis(format!("unknown basis `{other}`"))),
        }
    }
}

impl std::fmt::Display for BasisName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Deserialize)]
struct RawShell {
    l: usize,
    exps: Vec<f64>,
    coefs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawFile {
    format: String,
    sets: BTreeMap<String, BTreeMap<String, Vec<RawShell>>>,
}

fn library() -> &'static RawFile {
    static LIB: OnceLock<RawFile> = OnceLock::new();
    LIB.get_or_init(|| {
        let f: RawFile = serde_json::from_str(BASIS_JSON).expect("embedded basis data is valid");
        assert_eq!(f.format, "sqdlab-basis-v1");
        f
    })
}

/// A contracted Cartesian shell. `coefs` already include the primitive
/// normalization and the overall contraction normalization, so the
/// `x^l e^{-a r^2}` component has unit self-overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisShell {
    pub center_atom_index: usize,
    pub center: [f64; 3],
    pub angular_momentum: usize,
    pub exponents: Vec<f64>,
    pub contraction_coefficients: Vec<f64>,
}

impl BasisShell {
    pub fn n_functions(&self) -> usize {
        match self.angular_momentum {
            0 => 1,
            1 => 3,
            _ => unreachable!("only s and p shells are supported"),
        }
    }

    /// Build a normalized shell from raw coefficients defined over
    /// normalized primitives. Exponents are sorted descending.
    pub fn new(atom: usize, center: [f64; 3], l: usize, exps: &[f64], coefs: &[f64]) -> Result<Self> {
        if l > 1 {
            return Err(Error::Basis(format!("angular momentum {l} not supported")));
        }
        if exps.len() != coefs.len() || exps.is_empty() {
            return Err(Error::Basis("exponent/coefficient length mismatch".into()));
        }
        if exps.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Basis("non-positive exponent".into()));
        }
        let mut pairs: Vec<(f64, f64)> = exps.iter().copied().zip(coefs.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let exps: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let mut c: Vec<f64> = pairs
            .iter()
            .map(|&(a, c)| c * primitive_norm(a, l))
            .collect();
        let mut s = 0.0;
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                s += c[i] * c[j] * same_center_overlap(exps[i], exps[j], l);
            }
        }
        let scale = 1.0 / s.sqrt();
        for x in &mut c {
            *x *= scale;
        }
        Ok(Self {
            center_atom_index: atom,
            center,
            angular_momentum: l,
            exponents: exps,
            contraction_coefficients: c,
        })
    }

    /// Self-overlap of the `x^l` component, 1 after normalization.
    pub fn self_overlap(&self) -> f64 {
        let l = self.angular_momentum;
        let mut s = 0.0;
        for (i, &a) in self.exponents.iter().enumerate() {
            for (j, &b) in self.exponents.iter().enumerate() {
                s += self.contraction_coefficients[i]
                    * self.contraction_coefficients[j]
                    * same_center_overlap(a, b, l);
            }
        }
        s
    }
}

/// Normalization of `x^l e^{-a r^2}` for l ≤ 1.
fn primitive_norm(a: f64, l: usize) -> f64 {
    let base = (2.0 * a / PI).powf(0.75);
    match l {
        0 => base,
        _ => base * 2.0 * a.sqrt(),
    }
}

/// ∫ x^{2l} e^{-(a+b) r^2} d^3r for l ≤ 1.
fn same_center_overlap(a: f64, b: f64, l: usize) -> f64 {
    let p = a + b;
    let s = (PI / p).powf(1.5);
    match l {
        0 => s,
        _ => s / (2.0 * p),
    }
}

/// Raw shells of `element` in `basis`, as `(l, exponents, coefficients)`.
pub fn element_shells(basis: BasisName, element: &str) -> Result<Vec<(usize, Vec<f64>, Vec<f64>)>> {
    let set = library()
        .sets
        .get(basis.key())
        .ok_or_else(|| Error::Basis(format!("missing basis set {basis}")))?;
    let shells = set
        .get(element)
        .ok_or_else(|| Error::Basis(format!("{element} not tabulated in {basis}")))?;
    Ok(shells
        .iter()
        .map(|s| (s.l, s.exps.clone(), s.coefs.clone()))
        .collect())
}

/// All shells for a molecule, atom by atom, in file order (s before p).
pub fn build_shells(mol: &Molecule, basis: BasisName) -> Result<Vec<BasisShell>> {
    let mut out = Vec::new();
    for (ia, atom) in mol.atoms.iter().enumerate() {
        for (l, exps, coefs) in element_shells(basis, &atom.symbol)? {
            out.push(BasisShell::new(ia, atom.position, l, &exps, &coefs)?);
        }
    }
    Ok(out)
}

/// A single Cartesian atomic orbital: shell index and exponents (lx, ly, lz).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AoFunction {
    pub shell: usize,
    pub lmn: [usize; 3],
}

/// Expand shells into AO functions; p shells are ordered x, y, z.
pub fn ao_functions(shells: &[BasisShell]) -> Vec<AoFunction> {
    let mut out = Vec::new();
    for (i, s) in shells.iter().enumerate() {
        match s.angular_momentum {
            0 => out.push(AoFunction { shell: i, lmn: [0, 0, 0] }),
            _ => {
                for k in 0..3 {
                    let mut lmn = [0; 3];
                    lmn[k] = 1;
                    out.push(AoFunction { shell: i, lmn });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_element_normalizes() {
        for basis in [BasisName::Sto3g, BasisName::AnoValence] {
            for el in ["H", "He", "Li", "Be", "C", "N", "O", "S", "Cl"] {
                for (l, e, c) in element_shells(basis, el).unwrap() {
                    let s = BasisShell::new(0, [0.0; 3], l, &e, &c).unwrap();
                    assert!((s.self_overlap() - 1.0).abs() < 1e-12, "{basis} {el}");
                    assert!(s.exponents.windows(2).all(|w| w[0] > w[1]));
                }
            }
        }
    }

    #[test]
    fn six31g_only_h_he() {
        assert!(element_shells(BasisName::B631g, "H").is_ok());
        assert!(element_shells(BasisName::B631g, "He").is_ok());
        assert!(element_shells(BasisName::B631g, "C").is_err());
    }
}
