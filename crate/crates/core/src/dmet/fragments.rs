//! Atom-based fragment partitions.

use serde::{Deserialize, Serialize};

use crate::molint::Molecule;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FragmentScheme {
    /// One fragment per atom.
    #[default]
    Atoms,
    /// One fragment per heavy atom; each hydrogen joins its nearest heavy atom.
    HeavyAtoms,
    /// A single fragment holding the whole molecule.
    Whole,
    /// Explicit atom groups.
    Groups(Vec<Vec<usize>>),
}

impl std::str::FromStr for FragmentScheme {
    type Err = Error;
    /// `atoms`, `heavy`, `whole`, or groups such as `0,1;2;3`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "atoms" | "atom" => Ok(FragmentScheme::Atoms),
            "heavy" | "heavy-atoms" => Ok(FragmentScheme::HeavyAtoms),
            "whole" | "molecule" => Ok(FragmentScheme::Whole),
            text => {
                let groups = text
                    .split(';')
                    .map(|g| {
                        g.split(',')
                            .map(|x| {
                                x.trim()
                                    .parse::<usize>()
                                    .map_err(|_| Error::Invalid(format!("bad atom index `{x}` in fragment list")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FragmentScheme::Groups(groups))
            }
        }
    }
}

/// Atom groups for a scheme; validated to partition the atoms.
pub fn atom_groups(mol: &Molecule, scheme: &FragmentScheme) -> Result<Vec<Vec<usize>>> {
    let n = mol.atoms.len();
    let groups = match scheme {
        FragmentScheme::Atoms => (0..n).map(|a| vec![a]).collect(),
        FragmentScheme::Whole => vec![(0..n).collect()],
        FragmentScheme::Groups(g) => g.clone(),
        FragmentScheme::HeavyAtoms => {
            let heavy: Vec<usize> = (0..n).filter(|&a| mol.atoms[a].z > 1).collect();
            if heavy.is_empty() {
                return Err(Error::Invalid("no heavy atom to anchor hydrogens".into()));
            }
            let owner: Vec<usize> = (0..n)
                .map(|a| {
                    if mol.atoms[a].z > 1 {
                        a
                    } else {
                        *heavy
                            .iter()
                            .min_by(|&&x, &&y| mol.distance(a, x).total_cmp(&mol.distance(a, y)))
                            .unwrap()
                    }
                })
                .collect();
            heavy
                .iter()
                .map(|&h| (0..n).filter(|&a| owner[a] == h).collect())
                .collect()
        }
    };
    validate_partition(&groups, n)?;
    Ok(groups)
}

/// Every atom in exactly one non-empty group.
pub fn validate_partition(groups: &[Vec<usize>], n_atoms: usize) -> Result<()> {
    let mut seen = vec![false; n_atoms];
    for (k, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::Dmet { fragment: k, message: "empty fragment".into() });
        }
        for &a in g {
            if a >= n_atoms {
                return Err(Error::Dmet { fragment: k, message: format!("atom {a} out of range") });
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::Dmet { fragment: k, message: format!("atom {a} assigned twice") });
            }
        }
    }
    if let Some(a) = seen.iter().position(|&s| !s) {
        return Err(Error::Invalid(format!("atom {a} belongs to no fragment")));
    }
    Ok(())
}

/// Localized-orbital indices per group.
pub fn fragment_orbitals(groups: &[Vec<usize>], ao_atom_map: &[usize]) -> Vec<Vec<usize>> {
    groups
        .iter()
        .map(|g| (0..ao_atom_map.len()).filter(|&i| g.contains(&ao_atom_map[i])).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    #[test]
    fn amantadine_heavy_atom_groups() {
        let mol = systems::AMANTADINE.molecule();
        let g = atom_groups(&mol, &FragmentScheme::HeavyAtoms).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], vec![0, 1, 2]);
        assert_eq!(g[1], vec![3]);
    }

    #[test]
    fn partition_errors() {
        assert!(validate_partition(&[vec![0], vec![0, 1]], 2).is_err());
        assert!(validate_partition(&[vec![0]], 2).is_err());
        assert!(validate_partition(&[vec![0], vec![]], 1).is_err());
        assert!("0,1;2".parse::<FragmentScheme>().is_ok());
        assert!("0,x".parse::<FragmentScheme>().is_err());
    }
}
