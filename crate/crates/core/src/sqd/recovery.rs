//! Configuration recovery: repair rows whose α or β half has the wrong
//! Hamming weight by stochastic bit flips biased towards a reference
//! occupancy vector.
//!
//! For a half with surplus electrons, occupied bit q is cleared with
//! probability ∝ max(1 − occ_q, δ); for a deficit, empty bit q is set with
//! probability ∝ max(occ_q, δ). One bit is flipped at a time until the
//! weight matches. δ = 10⁻³ keeps every candidate reachable.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::{Error, Result};

pub const FLIP_FLOOR: f64 = 1e-3;

/// Candidate bits and their flip weights for one spin half.
/// `half` holds the bits, `occ` the reference occupancies of the same orbitals.
pub fn flip_weights(half: u64, occ: &[f64], surplus: bool) -> Vec<(usize, f64)> {
    (0..occ.len())
        .filter(|&q| (half >> q & 1 == 1) == surplus)
        .map(|q| {
            let bit = if surplus { 1.0 } else { 0.0 };
            let w = if surplus { bit - occ[q] } else { occ[q] - bit };
            (q, w.max(FLIP_FLOOR))
        })
        .collect()
}

fn repair_half<R: Rng>(mut half: u64, occ: &[f64], target: usize, rng: &mut R) -> u64 {
    loop {
        let w = half.count_ones() as usize;
        if w == target {
            return half;
        }
        let cands = flip_weights(half, occ, w > target);
        let dist = WeightedIndex::new(cands.iter().map(|c| c.1)).expect("positive flip weights");
        half ^= 1 << cands[dist.sample(rng)].0;
    }
}

/// Repair every non-compliant row. `occ_avg` is [α_0..α_{n−1}, β_0..β_{n−1}];
/// probabilities are renormalized over the output rows.
pub fn recover_configurations<R: Rng>(
    rows: &[u64],
    probs: &[f64],
    occ_avg: &[f64],
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    rng: &mut R,
) -> Result<(Vec<u64>, Vec<f64>)> {
    if occ_avg.len() != 2 * n_orb {
        return Err(Error::Dimension(format!("occupancy vector of length {} for {n_orb} orbitals", occ_avg.len())));
    }
    if let Some(x) = occ_avg.iter().find(|x| !(-1e-12..=1.0 + 1e-12).contains(*x)) {
        return Err(Error::Invalid(format!("occupancy {x} outside [0, 1]")));
    }
    if rows.len() != probs.len() {
        return Err(Error::Dimension("rows / probabilities".into()));
    }
    let mask = (1u64 << n_orb) - 1;
    let (occ_a, occ_b) = occ_avg.split_at(n_orb);
    let out: Vec<u64> = rows
        .iter()
        .map(|&x| {
            let (a, b) = (x & mask, x >> n_orb);
            let a = repair_half(a, occ_a, n_alpha, rng);
            let b = repair_half(b, occ_b, n_beta, rng);
            a | (b << n_orb)
        })
        .collect();
    let total: f64 = probs.iter().sum();
    Ok((out, probs.iter().map(|p| p / total).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compliant_rows_pass_through() {
        let rows = [0b0101u64, 0b1010, 0b0110];
        let p = [0.5, 0.25, 0.25];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (out, q) = recover_configurations(&rows, &p, &[0.5; 4], 2, 1, 1, &mut rng).unwrap();
        assert_eq!(out, rows);
        assert_eq!(q, p);
    }

    #[test]
    fn surplus_weights_follow_deviation() {
        // α half 0b1011 on 4 orbitals, reference one-hot on 0b0011.
        let w = flip_weights(0b1011, &[1.0, 1.0, 0.0, 0.0], true);
        assert_eq!(w, vec![(0, FLIP_FLOOR), (1, FLIP_FLOOR), (3, 1.0)]);
        let w = flip_weights(0b0001, &[1.0, 1.0, 0.0, 0.0], false);
        assert_eq!(w, vec![(1, 1.0), (2, FLIP_FLOOR), (3, FLIP_FLOOR)]);
    }

    #[test]
    fn out_of_range_occupancy_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(recover_configurations(&[0], &[1.0], &[1.5, 0.0], 1, 0, 0, &mut rng).is_err());
    }
}
