//! The iterative SQD loop.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SQDConfig;
use super::recovery::recover_configurations;
use super::subsample::{postselect, postselect_and_subsample};
use crate::detspace::{binomial, solve_in_space, DavidsonOptions, Determinant, DetSpace, SpectralResult};
use crate::qsim::Counts;
use crate::scf::MOIntegrals;
use crate::seeds::derive_seed;
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceDims {
    /// Unique raw bitstrings.
    pub samp: u64,
    /// Unique compliant bitstrings after recovery.
    pub postcr: u64,
    /// Diagonalized subspace.
    pub sub: u64,
    /// Symmetry sector.
    pub sym: u128,
    /// Full register, 2^(2·n_orb).
    pub hilbert: u128,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceRatios {
    pub eta_sym: f64,
    pub eta_postcr: f64,
    pub eta_sub: f64,
}

pub fn space_metrics(d: &SpaceDims) -> Result<SpaceRatios> {
    if d.sym == 0 || d.hilbert == 0 {
        return Err(Error::Invalid("empty symmetry sector".into()));
    }
    let s = d.sym as f64;
    Ok(SpaceRatios {
        eta_sym: s / d.hilbert as f64,
        eta_postcr: d.postcr as f64 / s,
        eta_sub: d.sub as f64 / s,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Total energies per batch.
    pub energies: Vec<f64>,
    pub dim_postcr: u64,
    pub dim_sub: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SQDResult {
    /// Lowest total energy over all iterations and batches.
    pub e_sqd: f64,
    /// Lowest energy per iteration.
    pub energies: Vec<f64>,
    pub history: Vec<IterationRecord>,
    /// Dimensions of the iteration and batch that produced `e_sqd`.
    pub dims: SpaceDims,
    pub ratios: SpaceRatios,
    pub best_iteration: usize,
    pub avg_occupancy: Vec<f64>,
    pub s2: f64,
    /// Fraction of raw shots already inside the symmetry sector.
    pub raw_sector_fraction: f64,
}

/// Diagonalize H in one batch; energies include the core term.
pub fn solve_fermion(batch: &DetSpace, mo: &MOIntegrals, davidson_max_cycles: usize) -> Result<SpectralResult> {
    let opts = DavidsonOptions {
        max_cycles: davidson_max_cycles,
        ..DavidsonOptions::default()
    };
    solve_in_space(batch, mo, &opts)
}

/// The subspace and ground vector behind [`SQDResult::e_sqd`].
#[derive(Clone, Debug)]
pub struct SqdState {
    pub space: DetSpace,
    pub vector: Vec<f64>,
}

pub fn run_sqd(counts: &Counts, mo: &MOIntegrals, n_alpha: usize, n_beta: usize, cfg: &SQDConfig) -> Result<SQDResult> {
    run_sqd_with_state(counts, mo, n_alpha, n_beta, cfg).map(|(r, _)| r)
}

/// [`run_sqd`] that also returns the best subspace and its eigenvector.
pub fn run_sqd_with_state(
    counts: &Counts,
    mo: &MOIntegrals,
    n_alpha: usize,
    n_beta: usize,
    cfg: &SQDConfig,
) -> Result<(SQDResult, SqdState)> {
    cfg.validate()?;
    let n = mo.n_orb;
    if counts.is_empty() {
        return Err(Error::Invalid("no counts".into()));
    }
    if counts.n_qubits != 2 * n {
        return Err(Error::Dimension(format!("{}-bit counts for {n} orbitals", counts.n_qubits)));
    }
    let rows: Vec<u64> = counts.counts.keys().copied().collect();
    let total = counts.total() as f64;
    let probs: Vec<f64> = counts.counts.values().map(|&c| c as f64 / total).collect();
    let sym = binomial(n, n_alpha) * binomial(n, n_beta);
    let eps_s = cfg.samples_per_batch.resolve(sym);
    let raw_sector_fraction = postselect(&rows, &probs, n, n_alpha, n_beta).values().sum::<f64>();

    let mut cache: HashMap<Vec<Determinant>, SpectralResult> = HashMap::new();
    let mut occ_mean: Option<Vec<f64>> = None;
    let mut history = Vec::new();
    let mut energies = Vec::new();
    let mut best: Option<(usize, u64, DetSpace, SpectralResult)> = None;
    for it in 0..cfg.n_iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, it as u64, 0x5351_4400));
        let (b, p) = match &occ_mean {
            None => (rows.clone(), probs.clone()),
            Some(occ) => recover_configurations(&rows, &probs, occ, n, n_alpha, n_beta, &mut rng)?,
        };
        let dim_postcr = postselect(&b, &p, n, n_alpha, n_beta).len() as u64;
        let batches = postselect_and_subsample(&b, &p, n, n_alpha, n_beta, eps_s, cfg.n_batches, &mut rng)?;
        let todo: Vec<&DetSpace> = batches.iter().map(|x| &x.space).filter(|s| !cache.contains_key(&s.dets)).collect();
        let fresh = par::map_slice(&todo, |s| solve_fermion(s, mo, cfg.davidson_max_cycles));
        for (s, r) in todo.iter().zip(fresh) {
            let r = r?;
            cache.insert(s.dets.clone(), r);
        }
        let solved: Vec<&SpectralResult> = batches.iter().map(|x| &cache[&x.space.dets]).collect();
        let mut mean = vec![0.0; 2 * n];
        for s in &solved {
            for (m, o) in mean.iter_mut().zip(&s.avg_occupancy) {
                *m += o / solved.len() as f64;
            }
        }
        occ_mean = Some(mean.iter().map(|x| x.clamp(0.0, 1.0)).collect());
        let (kbest, sbest) = solved
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.e_total.total_cmp(&b.1.e_total))
            .expect("at least one batch");
        let e_best = sbest.e_total;
        if best.as_ref().is_none_or(|b| e_best < b.3.e_total) {
            best = Some((it, dim_postcr, batches[kbest].space.clone(), (*sbest).clone()));
        }
        energies.push(e_best);
        history.push(IterationRecord {
            iteration: it,
            energies: solved.iter().map(|s| s.e_total).collect(),
            dim_postcr,
            dim_sub: batches.iter().map(|x| x.space.len() as u64).collect(),
        });
    }
    let (best_iteration, postcr, space, spec) = best.expect("at least one iteration");
    let dims = SpaceDims {
        samp: rows.len() as u64,
        postcr,
        sub: space.len() as u64,
        sym,
        hilbert: 1u128 << (2 * n),
    };
    let result = SQDResult {
        e_sqd: spec.e_total,
        energies,
        history,
        ratios: space_metrics(&dims)?,
        dims,
        best_iteration,
        avg_occupancy: spec.avg_occupancy,
        s2: spec.s2,
        raw_sector_fraction,
    };
    Ok((result, SqdState { space, vector: spec.ground_vector }))
}
