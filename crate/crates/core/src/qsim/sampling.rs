//! Shot sampling with optional two-qubit depolarizing trajectories and
//! readout flips, and the plain-text counts exchange format.
//!
//! A counts file holds one `bitstring count` pair per line. Bitstrings are
//! 2·n_orb characters, most significant qubit first, so the right half is
//! the α register and the left half the β register. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gates::{apply_gate, Circuit, Gate};
use super::state::Statevector;
use crate::seeds::derive_seed;
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub enabled: bool,
    /// Probability of a random non-identity two-qubit Pauli after each multi-qubit gate.
    pub two_qubit_depolarizing: f64,
    /// Independent per-bit flip probability at readout.
    pub readout_flip: f64,
    /// Number of circuit trajectories the shots are spread over.
    pub trajectories: usize,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            enabled: false,
            two_qubit_depolarizing: 0.0,
            readout_flip: 0.0,
            trajectories: 100,
        }
    }

    pub fn readout(p_ro: f64) -> Self {
        Self {
            enabled: p_ro > 0.0,
            readout_flip: p_ro,
            ..Self::noiseless()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.two_qubit_depolarizing) {
            return Err(Error::Invalid(format!("depolarizing rate {} outside [0, 1]", self.two_qubit_depolarizing)));
        }
        if !(0.0..=0.5).contains(&self.readout_flip) {
            return Err(Error::Invalid(format!("readout flip probability {} outside [0, 0.5]", self.readout_flip)));
        }
        if self.trajectories == 0 {
            return Err(Error::Invalid("at least one noise trajectory is required".into()));
        }
        Ok(())
    }

    fn p2(&self) -> f64 {
        if self.enabled { self.two_qubit_depolarizing } else { 0.0 }
    }

    fn p_ro(&self) -> f64 {
        if self.enabled { self.readout_flip } else { 0.0 }
    }
}

/// Measurement outcomes keyed by register index (bit k = qubit k).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, x: u64, n: u64) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    pub fn merge(&mut self, other: &Counts) {
        for (&x, &n) in &other.counts {
            self.add(x, n);
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn n_unique(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn bitstring(&self, x: u64) -> String {
        format!("{:0width$b}", x, width = self.n_qubits)
    }

    /// Fraction of shots whose α/β halves do not hold (n_alpha, n_beta) ones.
    pub fn violating_fraction(&self, n_alpha: usize, n_beta: usize) -> f64 {
        let n = self.n_qubits / 2;
        let mask = (1u64 << n) - 1;
        let bad: u64 = self
            .counts
            .iter()
            .filter(|(&x, _)| (x & mask).count_ones() as usize != n_alpha || (x >> n).count_ones() as usize != n_beta)
            .map(|(_, &c)| c)
            .sum();
        bad as f64 / self.total().max(1) as f64
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&x, &n) in &self.counts {
            writeln!(s, "{} {}", self.bitstring(x), n).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut out: Option<Counts> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Invalid(format!("counts line {}: `{line}`", ln + 1));
            let mut it = line.split_whitespace();
            let (b, n) = (it.next().ok_or_else(bad)?, it.next().ok_or_else(bad)?);
            if it.next().is_some() || b.len() > 64 || b.len() % 2 != 0 || !b.chars().all(|c| c == '0' || c == '1') {
                return Err(bad());
            }
            let x = u64::from_str_radix(b, 2).map_err(|_| bad())?;
            let n: u64 = n.parse().map_err(|_| bad())?;
            let c = out.get_or_insert_with(|| Counts::new(b.len()));
            if c.n_qubits != b.len() {
                return Err(Error::Invalid(format!("counts line {}: width {} differs from {}", ln + 1, b.len(), c.n_qubits)));
            }
            c.add(x, n);
        }
        out.ok_or_else(|| Error::Invalid("counts file holds no entries".into()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn draw_shots(probs: &[f64], n_shots: u64, p_ro: f64, n_qubits: usize, rng: &mut ChaCha8Rng, out: &mut Counts) {
    if n_shots == 0 {
        return;
    }
    let support: Vec<usize> = (0..probs.len()).filter(|&x| probs[x] > 0.0).collect();
    let dist = WeightedIndex::new(support.iter().map(|&x| probs[x])).expect("normalized state has positive weight");
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..n_shots {
        let mut x = support[dist.sample(rng)] as u64;
        if p_ro > 0.0 {
            for q in 0..n_qubits {
                if rng.random_bool(p_ro) {
                    x ^= 1 << q;
                }
            }
        }
        *tally.entry(x).or_insert(0) += 1;
    }
    for (x, n) in tally {
        out.add(x, n);
    }
}

/// Multinomial shots from |amplitude|² with readout flips when enabled.
/// Two-qubit depolarizing needs the circuit; see [`sample_circuit`].
pub fn sample_counts(state: &Statevector, n_shots: u64, seed: u64, noise: &NoiseModel) -> Result<Counts> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Counts::new(state.n_qubits);
    draw_shots(&state.probabilities(), n_shots, noise.p_ro(), state.n_qubits, &mut rng, &mut out);
    Ok(out)
}

const PAULIS: [fn(usize) -> Option<Gate>; 4] = [|_| None, |q| Some(Gate::X(q)), |q| Some(Gate::Y(q)), |q| Some(Gate::Z(q))];

fn run_trajectory(circuit: &Circuit, p2: f64, rng: &mut ChaCha8Rng) -> Result<Statevector> {
    let mut s = Statevector::zero(circuit.n_qubits)?;
    for g in &circuit.gates {
        apply_gate(&mut s, g);
        let qs = g.qubits();
        if qs.len() >= 2 && p2 > 0.0 && rng.random_bool(p2) {
            let k = rng.random_range(1..16usize);
            let (a, b) = (qs[qs.len() - 2], qs[qs.len() - 1]);
            for e in [PAULIS[k % 4](a), PAULIS[k / 4](b)].into_iter().flatten() {
                apply_gate(&mut s, &e);
            }
        }
    }
    Ok(s)
}

/// Sample a circuit from |0…0⟩. Without depolarizing noise the state is
/// prepared once; otherwise the shots are split over independent Pauli
/// trajectories, each with its own seeded stream.
pub fn sample_circuit(circuit: &Circuit, n_shots: u64, seed: u64, noise: &NoiseModel) -> Result<Counts> {
    noise.validate()?;
    if noise.p2() == 0.0 {
        let mut s = Statevector::zero(circuit.n_qubits)?;
        circuit.run(&mut s);
        return sample_counts(&s, n_shots, seed, noise);
    }
    let n_traj = (noise.trajectories as u64).min(n_shots).max(1);
    let parts = par::map_range(n_traj as usize, |t| -> Result<Counts> {
        let shots = n_shots / n_traj + u64::from((t as u64) < n_shots % n_traj);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x7472_616a, t as u64));
        let s = run_trajectory(circuit, noise.p2(), &mut rng)?;
        let mut c = Counts::new(circuit.n_qubits);
        draw_shots(&s.probabilities(), shots, noise.p_ro(), circuit.n_qubits, &mut rng, &mut c);
        Ok(c)
    });
    let mut out = Counts::new(circuit.n_qubits);
    for p in parts {
        out.merge(&p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_gives_single_outcome() {
        let s = Statevector::hartree_fock(3, 1, 1).unwrap();
        let c = sample_counts(&s, 500, 1, &NoiseModel::noiseless()).unwrap();
        assert_eq!(c.n_unique(), 1);
        assert_eq!(c.total(), 500);
        assert_eq!(c.to_text(), "001001 500\n");
    }

    #[test]
    fn text_round_trip_and_errors() {
        let c = Counts::from_text("# raw\n0101 3\n1010 2\n0101 1\n").unwrap();
        assert_eq!(c.total(), 6);
        assert_eq!(c.counts[&0b0101], 4);
        assert_eq!(Counts::from_text(&c.to_text()).unwrap(), c);
        assert!(Counts::from_text("012 3").is_err());
        assert!(Counts::from_text("01 3\n0101 1").is_err());
        assert!(Counts::from_text("").is_err());
    }

    #[test]
    fn depolarizing_trajectories_conserve_shots() {
        let mut c = Circuit::new(4);
        c.push(Gate::X(0));
        c.push(Gate::Cx(0, 1));
        c.push(Gate::CPhase(1, 2, 0.3));
        let noise = NoiseModel {
            enabled: true,
            two_qubit_depolarizing: 0.3,
            readout_flip: 0.01,
            trajectories: 7,
        };
        let a = sample_circuit(&c, 1001, 9, &noise).unwrap();
        assert_eq!(a.total(), 1001);
        assert!(a.n_unique() > 1);
        assert_eq!(a, sample_circuit(&c, 1001, 9, &noise).unwrap());
    }
}
