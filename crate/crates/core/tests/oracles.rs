//! Slater–Condon against a Jordan–Wigner Pauli construction, and Davidson
//! against dense diagonalization.

mod common;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sqdlab::detspace::{build_subspace_hamiltonian, enumerate_symmetry_space, DetSpace};

fn max_deviation(space: &DetSpace, h: &common::PauliSum, mo: &sqdlab::scf::MOIntegrals) -> f64 {
    let sc = build_subspace_hamiltonian(space, mo).unwrap().to_dense();
    let (jw, imag) = common::pauli_matrix(h, space);
    assert!(imag < 1e-12, "imaginary residue {imag}");
    (sc - jw).abs().max()
}

#[test]
fn slater_condon_equals_pauli_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, p) in common::small_systems() {
        let n = p.n_orb();
        assert!(2 * n <= 12, "{name}");
        let h = common::jordan_wigner_hamiltonian(&p.mo);
        let (na, nb) = (p.n_alpha, p.n_beta);
        let mut sectors = vec![(na, nb), (na + 1, nb - 1)];
        if n > na + 1 {
            sectors.push((na + 1, nb));
        }
        for (a, b) in sectors {
            let full = enumerate_symmetry_space(n, a, b).unwrap();
            let dev = max_deviation(&full, &h, &p.mo);
            assert!(dev < 1e-10, "{name} ({a},{b}) full space: {dev:e}");
            let mut dets = full.dets.clone();
            dets.shuffle(&mut rng);
            dets.truncate(dets.len().div_ceil(2));
            let half = DetSpace::from_dets(n, a, b, dets).unwrap();
            let dev = max_deviation(&half, &h, &p.mo);
            assert!(dev < 1e-10, "{name} ({a},{b}) random half: {dev:e}");
        }
    }
}

#[test]
fn davidson_matches_dense_on_random_matrices() {
    for seed in 0..200 {
        let d = common::davidson_vs_dense(seed);
        assert!(d < 1e-9, "seed {seed}: {d:e}");
    }
}
