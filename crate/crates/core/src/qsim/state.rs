use nalgebra::Complex;

use crate::detspace::Determinant;
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest supported register.
pub const MAX_QUBITS: usize = 20;

/// Dense statevector over 2·n_orb qubits; qubit k is spin orbital k
/// (α orbital p → p, β orbital p → n_orb + p).
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amps: Vec<C64>,
}

impl Statevector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Invalid(format!("{n_qubits} qubits exceed the {MAX_QUBITS}-qubit limit")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index as usize] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Closed-shell Hartree–Fock occupation.
    pub fn hartree_fock(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        Self::basis(2 * n_orb, Determinant::hartree_fock(n_alpha, n_beta).to_index(n_orb))
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total probability of basis states with (N_α, N_β) particles.
    pub fn sector_probability(&self, n_alpha: usize, n_beta: usize) -> f64 {
        let n = self.n_qubits / 2;
        self.amps
            .iter()
            .enumerate()
            .filter(|(x, _)| {
                let d = Determinant::from_index(*x as u64, n);
                d.n_alpha() == n_alpha && d.n_beta() == n_beta
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn amplitude(&self, d: &Determinant) -> C64 {
        self.amps[d.to_index(self.n_qubits / 2) as usize]
    }
}
