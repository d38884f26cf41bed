//! Property tests for the structural invariants of each layer.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use nalgebra::{DMatrix, Rotation3, Vector3};
use proptest::prelude::*;

use sqdlab::detspace::det::apply_ops;
use sqdlab::detspace::{
    binomial, build_subspace_hamiltonian, davidson_lowest, enumerate_symmetry_space, fci_ground_state,
    DavidsonOptions, DetSpace, Determinant, SparseMatrix,
};
use sqdlab::dmet::{run_dmet, DmetConfig, FragmentScheme};
use sqdlab::molint::boys::boys;
use sqdlab::molint::{compute_ao_integrals, BasisName, Molecule};
use sqdlab::pipeline::Problem;
use sqdlab::qsim::{
    apply_gate, lucj_circuit, sample_counts, Circuit, Counts, LucjLayer, LucjParams, NoiseModel, Statevector, C64,
};
use sqdlab::qsim::lucj::push_rotation;
use sqdlab::qsim::rotation::expm_anti_hermitian;
use sqdlab::scan::{generate_grid, read_records, Axis, GridSpec, RecordWriter, ScanMolecule, ScanRecord};
use sqdlab::scf::ao_to_mo;
use sqdlab::seeds::derive_seed;
use sqdlab::sqd::{proliferate, run_sqd, SQDConfig, SamplesPerBatch};
use sqdlab::systems;

fn fast() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

fn problem(name: &str) -> &'static Problem {
    static CACHE: OnceLock<Vec<(String, Problem)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ["H2", "LiH", "H2O"]
            .iter()
            .map(|n| (n.to_string(), Problem::new(systems::find(n).unwrap().molecule(), BasisName::Sto3g).unwrap()))
            .collect()
    });
    &all.iter().find(|(n, _)| n == name).unwrap().1
}

fn fci(name: &str) -> f64 {
    static CACHE: OnceLock<Vec<(String, f64)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ["H2", "LiH", "H2O"]
            .iter()
            .map(|n| {
                let p = problem(n);
                let (_, r) = fci_ground_state(&p.mo, p.n_alpha, p.n_beta, &DavidsonOptions::default()).unwrap();
                (n.to_string(), r.e_total)
            })
            .collect()
    });
    all.iter().find(|(n, _)| n == name).unwrap().1
}

fn water() -> Molecule {
    systems::find("H2O").unwrap().molecule()
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn integrals_are_translation_invariant(dx in -5.0..5.0f64, dy in -5.0..5.0f64, dz in -5.0..5.0f64) {
        let m = water();
        let a = compute_ao_integrals(&m, BasisName::Sto3g).unwrap();
        let b = compute_ao_integrals(&m.translated([dx, dy, dz]), BasisName::Sto3g).unwrap();
        prop_assert!((&a.s - &b.s).amax() < 1e-10);
        prop_assert!((a.kinetic.as_ref().unwrap() - b.kinetic.as_ref().unwrap()).amax() < 1e-10);
        let de = a.eri.data.iter().zip(&b.eri.data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(de < 1e-10);
        prop_assert!((a.e_nuc - b.e_nuc).abs() < 1e-10);
    }

    #[test]
    fn rhf_energy_is_rotation_invariant(ax in -3.2..3.2f64, ay in -1.5..1.5f64, az in -3.2..3.2f64) {
        let m = water();
        let rot = Rotation3::from_euler_angles(ax, ay, az);
        let mut r = m.clone();
        for atom in &mut r.atoms {
            let p = rot * Vector3::from(atom.position);
            atom.position = [p.x, p.y, p.z];
        }
        let e0 = problem("H2O").rhf.e_total;
        let e1 = Problem::new(r, BasisName::Sto3g).unwrap().rhf.e_total;
        prop_assert!((e0 - e1).abs() < 1e-8, "{e0} vs {e1}");
    }

    #[test]
    fn stored_eri_has_eightfold_symmetry(i in 0usize..7, j in 0usize..7, k in 0usize..7, l in 0usize..7) {
        let eri = &problem("H2O").ao.eri;
        let v = eri.get(i, j, k, l);
        for w in [eri.get(j, i, k, l), eri.get(i, j, l, k), eri.get(j, i, l, k),
                  eri.get(k, l, i, j), eri.get(l, k, i, j), eri.get(k, l, j, i), eri.get(l, k, j, i)] {
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn boys_limits(m in 0usize..=sqdlab::molint::boys::MAX_ORDER, x in 30.0..200.0f64) {
        prop_assert!((boys(m, 0.0) - 1.0 / (2 * m + 1) as f64).abs() < 1e-14);
        let asym = 0.5 * (std::f64::consts::PI / x).sqrt();
        prop_assert!((boys(0, x) - asym).abs() < 1e-10);
    }
}

#[test]
fn eri_pack_unpack_is_idempotent() {
    let eri = &problem("H2O").ao.eri;
    let dense = eri.unpack();
    let (again, asym) = sqdlab::molint::PackedEri::from_dense(eri.n, &dense);
    assert_eq!(asym, 0.0);
    assert_eq!(again.data, eri.data);
}

#[test]
fn reference_energy_ordering() {
    for name in ["H2", "LiH", "H2O"] {
        let p = problem(name);
        assert!(p.rhf.e_total >= fci(name) - 1e-10, "{name}");
        let (_, e_mp2) = p.mp2().unwrap();
        assert!(e_mp2 <= 0.0, "{name}");
    }
    let p = problem("H2O");
    let (_, e_mp2) = p.mp2().unwrap();
    let cc = p.ccsd().unwrap();
    let e_fci_corr = fci("H2O") - p.rhf.e_total;
    assert!(cc.e_corr < e_mp2 && cc.e_corr > e_fci_corr, "{e_mp2} {} {e_fci_corr}", cc.e_corr);
}

fn givens_columns(c: &DMatrix<f64>, i: usize, j: usize, t: f64) -> DMatrix<f64> {
    let mut out = c.clone();
    let (s, co) = t.sin_cos();
    for r in 0..c.nrows() {
        out[(r, i)] = co * c[(r, i)] - s * c[(r, j)];
        out[(r, j)] = s * c[(r, i)] + co * c[(r, j)];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fci_is_invariant_under_occupied_and_virtual_rotations(t1 in -3.0..3.0f64, t2 in -3.0..3.0f64, v in 2usize..5) {
        let p = problem("LiH");
        let c = givens_columns(&p.rhf.mo_coeffs, 0, 1, t1);
        let c = givens_columns(&c, v, v + 1, t2);
        let mo = ao_to_mo(&p.ao, &c).unwrap();
        let (_, r) = fci_ground_state(&mo, 2, 2, &DavidsonOptions::default()).unwrap();
        prop_assert!((r.e_total - fci("LiH")).abs() < 1e-8);
    }

    #[test]
    fn variational_chain_over_nested_spaces(seed in any::<u64>(), keep_b in 0.3..1.0f64, keep_a in 0.1..1.0f64) {
        let p = problem("LiH");
        let full = enumerate_symmetry_space(6, 2, 2).unwrap();
        let mut x = seed;
        let mut pick = |frac: f64, from: &[Determinant]| -> Vec<Determinant> {
            from.iter().copied().filter(|_| { x = derive_seed(x, 1, 2); ((x >> 11) as f64 / (1u64 << 53) as f64) < frac }).collect()
        };
        let mut b = pick(keep_b, &full.dets);
        b.push(Determinant::hartree_fock(2, 2));
        b.sort();
        b.dedup();
        let mut a = pick(keep_a, &b);
        a.push(Determinant::hartree_fock(2, 2));
        a.sort();
        a.dedup();
        let energy = |dets: Vec<Determinant>| {
            let s = DetSpace::from_dets(6, 2, 2, dets).unwrap();
            sqdlab::detspace::solve_in_space(&s, &p.mo, &DavidsonOptions::default()).unwrap().e_total
        };
        let (ea, eb) = (energy(a), energy(b));
        prop_assert!(ea >= eb - 1e-9);
        prop_assert!(eb >= fci("LiH") - 1e-9);
    }

    #[test]
    fn davidson_is_independent_of_ordering(seed in any::<u64>()) {
        let p = problem("LiH");
        let space = enumerate_symmetry_space(6, 2, 2).unwrap();
        let h = build_subspace_hamiltonian(&space, &p.mo).unwrap().to_dense();
        let n = h.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = derive_seed(x, i as u64, 0);
            perm.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let hp = DMatrix::from_fn(n, n, |i, j| h[(perm[i], perm[j])]);
        let opts = DavidsonOptions { dense_threshold: 0, tol: 1e-10, ..DavidsonOptions::default() };
        let (e0, _, _) = davidson_lowest(&SparseMatrix::from_dense(&h), &opts).unwrap();
        let (e1, _, _) = davidson_lowest(&SparseMatrix::from_dense(&hp), &opts).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-9);
    }
}

#[test]
fn spectral_result_normalization() {
    for name in ["H2", "LiH", "H2O"] {
        let p = problem(name);
        let (_, r) = fci_ground_state(&p.mo, p.n_alpha, p.n_beta, &DavidsonOptions::default()).unwrap();
        let norm: f64 = r.ground_vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!((r.rdm1.trace() - (p.n_alpha + p.n_beta) as f64).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sector_sizes_match_brute_force(n in 1usize..=8, na in 0usize..=8, nb in 0usize..=8) {
        prop_assume!(na <= n && nb <= n);
        let space = enumerate_symmetry_space(n, na, nb).unwrap();
        let mut brute = 0u128;
        for x in 0u64..(1 << (2 * n)) {
            let d = Determinant::from_index(x, n);
            if d.n_alpha() == na && d.n_beta() == nb {
                brute += 1;
                prop_assert!(space.position(&d).is_some());
            }
        }
        prop_assert_eq!(space.len() as u128, brute);
        prop_assert_eq!(brute, binomial(n, na) * binomial(n, nb));
        let uniq: BTreeSet<_> = space.dets.iter().collect();
        prop_assert_eq!(uniq.len(), space.len());
        prop_assert!(space.dets.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn excitation_sign_is_ordering_consistent(occ in 0u64..(1 << 12), i in 0usize..12, j in 0usize..12, a in 0usize..12, b in 0usize..12) {
        prop_assume!(i != j && a != b);
        // a†_a a†_b a_j a_i = −a†_b a†_a a_j a_i = a†_b a†_a a_i a_j
        let x = apply_ops(occ, &[(a, true), (b, true), (j, false), (i, false)]);
        let y = apply_ops(occ, &[(b, true), (a, true), (j, false), (i, false)]);
        let z = apply_ops(occ, &[(b, true), (a, true), (i, false), (j, false)]);
        match (x, y, z) {
            (Some((sx, ox)), Some((sy, oy)), Some((sz, oz))) => {
                prop_assert_eq!(ox, oy);
                prop_assert_eq!(oy, oz);
                prop_assert!((sx + sy).abs() < 1e-12);
                prop_assert!((sx - sz).abs() < 1e-12);
            }
            (None, None, None) => {}
            other => prop_assert!(false, "inconsistent annihilation {:?}", other),
        }
    }

    #[test]
    fn determinant_index_round_trip(alpha in 0u32..(1 << 10), beta in 0u32..(1 << 10)) {
        let d = Determinant::new(alpha, beta);
        prop_assert_eq!(Determinant::from_index(d.to_index(10), 10), d);
        prop_assert_eq!(Determinant::from_bitstring(&d.to_bitstring(10)).unwrap(), d);
    }

    #[test]
    fn proliferated_batches_draw_from_observed_halves(rows in prop::collection::vec(0u64..(1 << 12), 1..40)) {
        let n = 6;
        let mask = (1u64 << n) - 1;
        let compliant: Vec<u64> = rows.iter().copied().filter(|&x| (x & mask).count_ones() == 2 && (x >> n).count_ones() == 2).collect();
        prop_assume!(!compliant.is_empty());
        let pool: BTreeSet<u32> = compliant.iter().flat_map(|&x| [(x & mask) as u32, (x >> n) as u32]).collect();
        let space = proliferate(&compliant, n, 2, 2).unwrap();
        for d in &space.dets {
            prop_assert!(pool.contains(&d.alpha) && pool.contains(&d.beta));
        }
        prop_assert_eq!(space.len(), pool.len() * pool.len());
    }

    #[test]
    fn seeds_are_pure_and_spread(m in any::<u64>(), a in 0u64..1000, b in 0u64..8) {
        prop_assert_eq!(derive_seed(m, a, b), derive_seed(m, a, b));
        prop_assert_ne!(derive_seed(m, a, b), derive_seed(m, a + 1, b));
        prop_assert_ne!(derive_seed(m, a, b), derive_seed(m, a, b + 1));
    }
}

fn random_lucj(n: usize, vals: &[f64]) -> LucjParams {
    let mut it = vals.iter().cycle().copied();
    let mut layer = LucjLayer::zeros(n);
    for p in 0..n {
        layer.t[(p, p)] = C64::new(0.0, it.next().unwrap());
        for q in 0..p {
            let z = C64::new(it.next().unwrap(), it.next().unwrap());
            layer.t[(p, q)] = z;
            layer.t[(q, p)] = -z.conj();
        }
        for q in 0..=p {
            let (u, w) = (it.next().unwrap(), it.next().unwrap());
            layer.j_aa[(p, q)] = u;
            layer.j_aa[(q, p)] = u;
            layer.j_ab[(p, q)] = w;
            layer.j_ab[(q, p)] = w;
        }
    }
    LucjParams { n_orb: n, layers: vec![layer], final_rotation: None }
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn lucj_gates_preserve_norm_and_sector(vals in prop::collection::vec(-1.5..1.5f64, 40), na in 1usize..4, nb in 1usize..4) {
        let n = 4;
        let params = random_lucj(n, &vals);
        let c = lucj_circuit(n, na, nb, &params);
        let mut s = Statevector::zero(2 * n).unwrap();
        for g in &c.gates {
            apply_gate(&mut s, g);
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }
        prop_assert!(1.0 - s.sector_probability(na, nb) < 1e-10);
    }

    #[test]
    fn orbital_rotation_undoes_itself(vals in prop::collection::vec(-2.0..2.0f64, 40), start in 0u64..256) {
        let n = 4;
        let t = random_lucj(n, &vals).layers[0].t.clone();
        let u = expm_anti_hermitian(&t);
        let mut c = Circuit::new(2 * n);
        push_rotation(&mut c, n, &u);
        push_rotation(&mut c, n, &u.adjoint());
        let s0 = Statevector::basis(2 * n, start).unwrap();
        let mut s = s0.clone();
        c.run(&mut s);
        prop_assert!((s.inner(&s0).norm() - 1.0).abs() < 1e-9);
        let err = s.amps.iter().zip(&s0.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9);
    }
}

/// Raw counts for a random LiH-shaped state: a few compliant rows plus noise.
fn lih_counts(rows: &[(u64, u64)]) -> Counts {
    let mut c = Counts::new(12);
    c.add(Determinant::hartree_fock(2, 2).to_index(6), 50);
    for &(x, n) in rows {
        c.add(x, n);
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sqd_never_undercuts_fci(rows in prop::collection::vec((0u64..(1 << 12), 1u64..20), 0..60), seed in any::<u64>(), eps in 1u64..60) {
        let p = problem("LiH");
        let cfg = SQDConfig { n_iterations: 3, samples_per_batch: SamplesPerBatch::Fixed(eps), n_batches: 2, seed, ..SQDConfig::default() };
        let r = run_sqd(&lih_counts(&rows), &p.mo, 2, 2, &cfg).unwrap();
        prop_assert!(r.e_sqd >= fci("LiH") - 1e-9);
        prop_assert!(r.ratios.eta_sub <= 1.0);
    }

    #[test]
    fn larger_budget_never_raises_energy(rows in prop::collection::vec((0u64..(1 << 12), 1u64..20), 0..60), seed in any::<u64>(), eps in 1u64..20) {
        let p = problem("LiH");
        let counts = lih_counts(&rows);
        let base = SQDConfig { n_iterations: 1, seed, ..SQDConfig::default() };
        let small = run_sqd(&counts, &p.mo, 2, 2, &SQDConfig { samples_per_batch: SamplesPerBatch::Fixed(eps), ..base.clone() }).unwrap();
        let large = run_sqd(&counts, &p.mo, 2, 2, &base).unwrap();
        prop_assert!(large.e_sqd <= small.e_sqd + 1e-9);
    }
}

#[test]
fn noiseless_sampling_stays_in_sector() {
    let s = Statevector::hartree_fock(6, 2, 2).unwrap();
    let c = sample_counts(&s, 2000, 3, &NoiseModel::noiseless()).unwrap();
    assert_eq!(c.total(), 2000);
    assert_eq!(c.violating_fraction(2, 2), 0.0);
}

#[test]
fn dmet_bath_bound_and_electron_closure() {
    let p = Problem::new(systems::find("LiH").unwrap().molecule(), BasisName::Sto3g).unwrap();
    let cfg = DmetConfig { fragments: FragmentScheme::Atoms, ..DmetConfig::default() };
    let r = run_dmet(&p, &cfg).unwrap();
    assert!(r.converged);
    let frag_orbs = [5usize, 1];
    for (nb, nf) in r.n_bath.iter().zip(frag_orbs) {
        assert!(*nb <= nf, "{nb} > {nf}");
    }
    assert!(r.trace.last().unwrap().n_error.abs() < 1e-6);
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn grid_is_a_pure_function_of_its_spec(r0 in 0.5..1.0f64, dr in 0.01..0.5f64, nr in 2usize..9, t0 in 80.0..100.0f64, nt in 2usize..9, stride in 1usize..4) {
        let spec = GridSpec::Grid2D { r: Axis::new(r0, r0 + dr, nr), theta: Axis::new(t0, t0 + 10.0, nt), stride };
        let a = generate_grid(ScanMolecule::H2O, BasisName::Sto3g, &spec).unwrap();
        let b = generate_grid(ScanMolecule::H2O, BasisName::Sto3g, &spec).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), nr.div_ceil(stride) * nt.div_ceil(stride));
        prop_assert!(a.windows(2).all(|w| w[0].k < w[1].k));
    }

    #[test]
    fn record_text_is_stable_after_one_round_trip(e in prop::collection::vec(-500.0..0.0f64, 4), t in prop::collection::vec(0.0..100.0f64, 4), k in 0usize..2000, run in 0usize..5) {
        let dir = tempfile::tempdir().unwrap();
        let rec = ScanRecord {
            k, run, r_angstrom: 1.0 + k as f64 * 1e-3, theta_degrees: Some(104.5),
            e_rhf: Some(e[0]), e_ccsd: Some(e[1]), e_fci: Some(e[2]), e_sqd: Some(e[3]),
            dim_sub: Some(7), dim_sym: Some(441), dim_hilbert: Some(16384), eta_sub: Some(7.0 / 441.0),
            t_int_s: t[0], t_ccsd_s: t[1], t_sample_s: t[2], t_sqd_s: t[3], seed: 99, status: "ok".into(),
            ..ScanRecord::default()
        };
        let write = |path: &std::path::Path, r: &ScanRecord| {
            let mut w = RecordWriter::open(path).unwrap();
            w.append(r).unwrap();
            w.flush().unwrap();
        };
        let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        write(&p1, &rec);
        let back = read_records(&p1).unwrap();
        prop_assert_eq!(back.len(), 1);
        write(&p2, &back[0]);
        prop_assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        for (x, y) in [(back[0].e_sqd.unwrap(), e[3]), (back[0].e_fci.unwrap(), e[2])] {
            prop_assert!((x - y).abs() <= 1e-11 * y.abs().max(1.0));
        }
    }
}

#[test]
fn scan_timings_are_non_negative_and_bounded_by_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = sqdlab::scan::ScanConfig::one_d(ScanMolecule::H2, BasisName::Sto3g, dir.path().join("t.csv"));
    cfg.grid = GridSpec::Explicit(vec![0.7, 1.1]);
    cfg.runs = 1;
    let t0 = std::time::Instant::now();
    sqdlab::scan::run_scan(&cfg).unwrap();
    let wall = t0.elapsed().as_secs_f64();
    let recs = read_records(&cfg.output).unwrap();
    assert_eq!(recs.len(), 2);
    for r in recs {
        let ts = [r.t_int_s, r.t_ccsd_s, r.t_sample_s, r.t_sqd_s];
        assert!(ts.iter().all(|&t| t >= 0.0));
        assert!(ts.iter().sum::<f64>() <= wall);
    }
}
