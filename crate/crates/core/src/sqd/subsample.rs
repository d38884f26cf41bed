//! Post-selection on Hamming weight, probability-weighted subsampling and
//! proliferation of half-strings into product spaces.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::detspace::DetSpace;
use crate::{Error, Result};

/// One diagonalization batch.
#[derive(Clone, Debug)]
pub struct Batch {
    pub space: DetSpace,
    /// Number of compliant rows it was built from.
    pub n_rows: usize,
}

/// Unique compliant rows with merged probabilities, ascending.
pub fn postselect(rows: &[u64], probs: &[f64], n_orb: usize, n_alpha: usize, n_beta: usize) -> BTreeMap<u64, f64> {
    let mask = (1u64 << n_orb) - 1;
    let mut out = BTreeMap::new();
    for (&x, &p) in rows.iter().zip(probs) {
        if (x & mask).count_ones() as usize == n_alpha && (x >> n_orb).count_ones() as usize == n_beta {
            *out.entry(x).or_insert(0.0) += p;
        }
    }
    out
}

/// Product space of the pooled half-strings. With equal particle numbers
/// the α and β pools coincide (U ⊗ U); otherwise each pool takes every
/// observed half of the right weight.
pub fn proliferate(rows: &[u64], n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<DetSpace> {
    let mask = (1u64 << n_orb) - 1;
    let halves: BTreeSet<u32> = rows.iter().flat_map(|&x| [(x & mask) as u32, (x >> n_orb) as u32]).collect();
    let pick = |k: usize| -> Vec<u32> { halves.iter().copied().filter(|h| h.count_ones() as usize == k).collect() };
    DetSpace::from_product(n_orb, n_alpha, n_beta, &pick(n_alpha), &pick(n_beta))
}

#[allow(clippy::too_many_arguments)]
pub fn postselect_and_subsample<R: Rng>(
    rows: &[u64],
    probs: &[f64],
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    samples_per_batch: u64,
    n_batches: usize,
    rng: &mut R,
) -> Result<Vec<Batch>> {
    if samples_per_batch == 0 {
        return Err(Error::Invalid("samples per batch must be at least 1".into()));
    }
    let uniq = postselect(rows, probs, n_orb, n_alpha, n_beta);
    if uniq.is_empty() {
        let n_unique = rows.iter().collect::<BTreeSet<_>>().len();
        return Err(Error::EmptySector { n_alpha, n_beta, n_unique });
    }
    let keys: Vec<u64> = uniq.keys().copied().collect();
    let weights: Vec<f64> = uniq.values().copied().collect();
    let mut out = Vec::with_capacity(n_batches);
    for _ in 0..n_batches {
        let chosen: Vec<u64> = if (keys.len() as u64) <= samples_per_batch {
            keys.clone()
        } else {
            let amount = samples_per_batch as usize;
            let idx = rand::seq::index::sample_weighted(rng, keys.len(), |i| weights[i].max(1e-300), amount)
                .map_err(|e| Error::Invalid(format!("weighted subsampling: {e}")))?;
            let mut v: Vec<u64> = idx.into_iter().map(|i| keys[i]).collect();
            v.sort_unstable();
            v
        };
        out.push(Batch {
            space: proliferate(&chosen, n_orb, n_alpha, n_beta)?,
            n_rows: chosen.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn proliferation_of_two_halves() {
        // α = 01, β = 10 for one row → pool {01, 10} → 4 determinants.
        let s = proliferate(&[0b1001], 2, 1, 1).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn empty_sector_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match postselect_and_subsample(&[0b1111, 0], &[0.5, 0.5], 2, 1, 1, 10, 1, &mut rng) {
            Err(Error::EmptySector { n_unique: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_limits_rows() {
        let rows: Vec<u64> = vec![0b0101, 0b0110, 0b1001, 0b1010];
        let p = vec![0.4, 0.3, 0.2, 0.1];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = postselect_and_subsample(&rows, &p, 2, 1, 1, 1, 3, &mut rng).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.iter().all(|x| x.n_rows == 1 && x.space.len() <= 4));
        let all = postselect_and_subsample(&rows, &p, 2, 1, 1, 100, 1, &mut rng).unwrap();
        assert_eq!(all[0].n_rows, 4);
    }
}
