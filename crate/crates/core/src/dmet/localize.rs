//! Orthonormal localized orbitals, one per AO and attached to the same atom.
//!
//! Meta-Löwdin: each atom's AOs are first replaced by their projections onto
//! the leading atomic-natural-orbital contractions of the same angular
//! momentum, then orthogonalized in three tiers (core, valence, Rydberg).
//! Each tier is symmetric-orthogonalized after projecting out the previous
//! tiers, so core and valence orbitals keep their atomic character.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::eigh;
use crate::molint::basis::{build_shells, element_shells, BasisShell};
use crate::molint::{overlap_between, BasisName, Molecule};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Localization {
    #[default]
    MetaLowdin,
    Lowdin,
}

impl std::str::FromStr for Localization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "metalowdin" | "meta" => Ok(Localization::MetaLowdin),
            "lowdin" => Ok(Localization::Lowdin),
            other => Err(Error::Invalid(format!("unknown localization `{other}`"))),
        }
    }
}

impl std::fmt::Display for Localization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Localization::MetaLowdin => "meta-lowdin",
            Localization::Lowdin => "lowdin",
        })
    }
}

/// S^{-1/2} restricted to eigenvalues above 1e-15.
fn lowdin(s: &DMatrix<f64>) -> DMatrix<f64> {
    let (w, v) = eigh(s);
    let n = s.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        if w[k] > 1e-15 {
            let col = v.column(k);
            out += col * col.transpose() / w[k].sqrt();
        }
    }
    out
}

/// Shell counts (s, p) that are core and core-plus-valence for element `z`.
fn shell_partition(z: u32) -> ([usize; 2], [usize; 2]) {
    match z {
        0..=2 => ([0, 0], [1, 0]),
        3..=10 => ([1, 0], [2, 1]),
        _ => ([2, 1], [3, 2]),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tier {
    Core,
    Valence,
    Rydberg,
}

/// Columns of the per-atom projected AOs (atom basis × atom basis).
fn projected_atomic_block(shells: &[BasisShell], ano: &[BasisShell]) -> Result<DMatrix<f64>> {
    let s0 = overlap_between(shells, shells);
    let n = s0.nrows();
    let s0_inv = s0
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Invalid("singular atomic overlap".into()))?;
    let proj = &s0_inv * overlap_between(shells, ano);
    let rm_ano = DMatrix::<f64>::identity(n, n) - &proj * proj.transpose() * &s0;
    let fn_l = |list: &[BasisShell]| {
        let mut by_l: Vec<Vec<usize>> = vec![Vec::new(); 2];
        let mut k = 0;
        for sh in list {
            for _ in 0..sh.n_functions() {
                by_l[sh.angular_momentum].push(k);
                k += 1;
            }
        }
        by_l
    };
    let atm_l = fn_l(shells);
    let ano_l = fn_l(ano);
    let mut c = rm_ano.clone();
    for l in 0..2 {
        let idx = &atm_l[l];
        let idxp = &ano_l[l];
        if idx.is_empty() {
            continue;
        }
        let deg = 2 * l + 1;
        if idxp.len() >= idx.len() {
            for (k, &i) in idx.iter().enumerate() {
                c.set_column(i, &proj.column(idxp[k]));
            }
        } else if !idxp.is_empty() {
            // More basis functions than reference contractions: keep the
            // projected ones first, then the complement shells with the
            // largest residual norm.
            let sdiag: Vec<f64> = idx
                .iter()
                .map(|&i| (rm_ano.column(i).transpose() * &s0 * rm_ano.column(i))[(0, 0)])
                .collect();
            let n_shell = idx.len() / deg;
            let mut avg: Vec<(usize, f64)> = (0..n_shell)
                .map(|k| (k, sdiag[k * deg..(k + 1) * deg].iter().sum()))
                .collect();
            avg.sort_by(|a, b| b.1.total_cmp(&a.1));
            let nleft = (idx.len() - idxp.len()) / deg;
            let rest: Vec<usize> = avg[..nleft]
                .iter()
                .flat_map(|&(k, _)| idx[k * deg..(k + 1) * deg].to_vec())
                .collect();
            for (k, &p) in idxp.iter().enumerate() {
                c.set_column(idx[k], &proj.column(p));
            }
            for (k, &r) in rest.iter().enumerate() {
                c.set_column(idx[idxp.len() + k], &rm_ano.column(r));
            }
        }
    }
    for j in 0..n {
        let norm = (c.column(j).transpose() * &s0 * c.column(j))[(0, 0)].sqrt();
        c.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(c)
}

/// Localized orbital coefficients X (n_ao × n_ao) with XᵀSX = 1. Column i
/// belongs to the atom of AO i.
pub fn localize(mol: &Molecule, basis: BasisName, s: &DMatrix<f64>, method: Localization) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if method == Localization::Lowdin {
        return Ok(lowdin(s));
    }
    let shells = build_shells(mol, basis)?;
    let mut pre = DMatrix::zeros(n, n);
    let mut tiers = Vec::with_capacity(n);
    let mut offset = 0;
    for (ia, atom) in mol.atoms.iter().enumerate() {
        let own: Vec<BasisShell> = shells.iter().filter(|s| s.center_atom_index == ia).cloned().collect();
        let mut ano = Vec::new();
        for (l, exps, coefs) in element_shells(BasisName::AnoValence, &atom.symbol)? {
            ano.push(BasisShell::new(ia, atom.position, l, &exps, &coefs)?);
        }
        let block = projected_atomic_block(&own, &ano)?;
        let m = block.nrows();
        pre.view_mut((offset, offset), (m, m)).copy_from(&block);
        let (core, cv) = shell_partition(atom.z);
        let mut count = [0usize; 2];
        for sh in &own {
            let l = sh.angular_momentum;
            let tier = if count[l] < core[l] {
                Tier::Core
            } else if count[l] < cv[l] {
                Tier::Valence
            } else {
                Tier::Rydberg
            };
            count[l] += 1;
            tiers.extend(std::iter::repeat(tier).take(sh.n_functions()));
        }
        offset += m;
    }
    if offset != n {
        return Err(Error::Dimension("localization basis size".into()));
    }
    let mut x = DMatrix::zeros(n, n);
    let mut done: Vec<usize> = Vec::new();
    for tier in [Tier::Core, Tier::Valence, Tier::Rydberg] {
        let cols: Vec<usize> = (0..n).filter(|&i| tiers[i] == tier).collect();
        if cols.is_empty() {
            continue;
        }
        let mut c = pre.select_columns(&cols);
        if !done.is_empty() {
            let prev = x.select_columns(&done);
            let overlap = prev.transpose() * s * &c;
            c -= prev * overlap;
        }
        let s1 = c.transpose() * s * &c;
        let orth = &c * lowdin(&s1);
        for (k, &i) in cols.iter().enumerate() {
            x.set_column(i, &orth.column(k));
        }
        done.extend(cols);
    }
    for i in 0..n {
        if x[(i, i)] < 0.0 {
            x.column_mut(i).neg_mut();
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molint::compute_ao_integrals;
    use crate::systems;

    #[test]
    fn orthonormal_for_both_methods() {
        let mol = systems::find("HOCN").unwrap().molecule();
        let ao = compute_ao_integrals(&mol, BasisName::Sto3g).unwrap();
        for m in [Localization::MetaLowdin, Localization::Lowdin] {
            let x = localize(&mol, BasisName::Sto3g, &ao.s, m).unwrap();
            let err = (x.transpose() * &ao.s * &x - DMatrix::identity(ao.n_ao, ao.n_ao)).amax();
            assert!(err < 1e-10, "{m}: {err}");
        }
    }

    #[test]
    fn core_orbital_stays_on_its_atom() {
        let mol = systems::find("H2O").unwrap().molecule();
        let ao = compute_ao_integrals(&mol, BasisName::Sto3g).unwrap();
        let x = localize(&mol, BasisName::Sto3g, &ao.s, Localization::MetaLowdin).unwrap();
        // Oxygen 1s: dominated by its own AO.
        let o1s = ao.ao_atom_map.iter().position(|&a| mol.atoms[a].symbol == "O").unwrap();
        assert!(x[(o1s, o1s)] > 0.95);
    }
}
