//! Local unitary cluster Jastrow states.
//!
//! One layer is e^{T̂} e^{iĴ} e^{−T̂} with a spin-shared orbital rotation
//! e^{T} and density–density phases
//! exp(i(½Σ_{pq} J^αα_pq n_pα n_qα + ½Σ_{pq} J^αα_pq n_pβ n_qβ + Σ_{pq} J^αβ_pq n_pα n_qβ)).
//! A final rotation built from t1 follows the layers.
//!
//! Parameters come from a double factorization of t2. With
//! M[(i,a),(j,b)] = t2[i,j,a,b] = Σ_k λ_k v_k v_kᵀ and the one-body
//! excitation O_k = Σ v_k[ia] E_ai, the cluster operator is ½Σ λ_k O_k² and
//! O² − O†² = i(P² − Q²) with the Hermitian P = (1−i)/2 (O + iO†) and
//! Q = (1+i)/2 (O − iO†). Each of P, Q is diagonalized by an orbital rotation,
//! giving two layers per eigenvector (signs +λ/2, −λ/2). Layers are ordered
//! by |λ| and truncated to `n_reps`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gates::{Circuit, Gate};
use super::rotation::{anti_hermiticity_error, expm_anti_hermitian, exterior_power, givens_decomposition, herm_eigh, logm_unitary};
use super::state::{Statevector, C64, MAX_QUBITS};
use crate::detspace::combinations;
use crate::detspace::det::bits;
use crate::linalg::eigh;
use crate::scf::Amplitudes;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    /// All same-spin and opposite-spin pairs.
    #[default]
    Full,
    /// Same-spin pairs |p − q| = 1 and on-site opposite-spin pairs only.
    Ladder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LucjLayer {
    /// Anti-Hermitian generator T (n_orb × n_orb).
    pub t: DMatrix<C64>,
    pub j_aa: DMatrix<f64>,
    pub j_ab: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LucjParams {
    pub n_orb: usize,
    pub layers: Vec<LucjLayer>,
    /// Final orbital rotation applied after the layers (unitary).
    pub final_rotation: Option<DMatrix<C64>>,
}

impl LucjLayer {
    pub fn zeros(n: usize) -> Self {
        Self {
            t: DMatrix::zeros(n, n),
            j_aa: DMatrix::zeros(n, n),
            j_ab: DMatrix::zeros(n, n),
        }
    }

    pub fn rotation(&self) -> DMatrix<C64> {
        expm_anti_hermitian(&self.t)
    }

    pub fn sparsify(&mut self, conn: Connectivity) {
        if conn == Connectivity::Ladder {
            let n = self.t.nrows();
            for p in 0..n {
                for q in 0..n {
                    if p.abs_diff(q) > 1 {
                        self.j_aa[(p, q)] = 0.0;
                    }
                    if p != q {
                        self.j_ab[(p, q)] = 0.0;
                    }
                }
            }
        }
    }
}

impl LucjParams {
    pub fn n_reps(&self) -> usize {
        self.layers.len()
    }

    /// Number of real parameters: n² per generator plus the upper triangles of J^αα and J^αβ.
    pub fn n_params(&self) -> usize {
        let n = self.n_orb;
        self.layers.len() * (n * n + n * (n + 1))
    }

    pub fn validate(&self) -> Result<()> {
        for (k, l) in self.layers.iter().enumerate() {
            let n = self.n_orb;
            if l.t.shape() != (n, n) || l.j_aa.shape() != (n, n) || l.j_ab.shape() != (n, n) {
                return Err(Error::Dimension(format!("LUCJ layer {k}")));
            }
            if anti_hermiticity_error(&l.t) > 1e-12 {
                return Err(Error::Invalid(format!("LUCJ layer {k}: generator is not anti-Hermitian")));
            }
            let asym = (&l.j_aa - l.j_aa.transpose()).amax().max((&l.j_ab - l.j_ab.transpose()).amax());
            if asym > 1e-12 {
                return Err(Error::Invalid(format!("LUCJ layer {k}: Jastrow matrix is not symmetric")));
            }
        }
        if let Some(u) = &self.final_rotation {
            let err = (u.adjoint() * u - DMatrix::identity(self.n_orb, self.n_orb)).iter().fold(0.0f64, |m, x| m.max(x.norm()));
            if err > 1e-10 {
                return Err(Error::Invalid("final orbital rotation is not unitary".into()));
            }
        }
        Ok(())
    }
}

/// Double-factorized LUCJ parameters from CCSD (or MP2) amplitudes.
///
/// Degenerate or vanishing t2 gives layers with zero generator and zero J.
pub fn lucj_params_from_t2(amp: &Amplitudes, n_reps: usize, conn: Connectivity) -> LucjParams {
    let (o, v) = (amp.n_occ, amp.n_virt);
    let n = o + v;
    let m = o * v;
    let mut layers = Vec::new();
    if m > 0 && n_reps > 0 {
        let mat = DMatrix::from_fn(m, m, |x, y| {
            let (i, a, j, b) = (x / v, x % v, y / v, y % v);
            0.5 * (amp.t2.get(i, j, a, b) + amp.t2.get(j, i, b, a))
        });
        let (eigs, vecs) = eigh(&mat);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| eigs[y].abs().partial_cmp(&eigs[x].abs()).unwrap().then(x.cmp(&y)));
        'outer: for &k in &order {
            let lam = eigs[k];
            let mut x = DMatrix::<C64>::zeros(n, n);
            for i in 0..o {
                for a in 0..v {
                    x[(o + a, i)] = C64::new(vecs[(i * v + a, k)], 0.0);
                }
            }
            let xt = x.transpose();
            let iu = C64::new(0.0, 1.0);
            for (sign, pref) in [(1.0, C64::new(0.5, -0.5)), (-1.0, C64::new(0.5, 0.5))] {
                if layers.len() == n_reps {
                    break 'outer;
                }
                let h = (&x + &xt * (iu * sign)) * pref;
                let mut layer = LucjLayer::zeros(n);
                if lam.abs() > 1e-12 {
                    let (mu, u) = herm_eigh(&h);
                    let j = DMatrix::from_fn(n, n, |p, q| sign * 0.5 * lam * mu[p] * mu[q]);
                    match logm_unitary(&u) {
                        Ok(t) => {
                            layer.t = t;
                            layer.j_aa = j.clone();
                            layer.j_ab = j;
                        }
                        Err(e) => eprintln!("warning: LUCJ factorization failed ({e}); using a zero Jastrow layer"),
                    }
                }
                layer.sparsify(conn);
                layers.push(layer);
            }
        }
    }
    while layers.len() < n_reps {
        layers.push(LucjLayer::zeros(n));
    }
    let final_rotation = if amp.t1.iter().any(|x| *x != 0.0) {
        let mut k = DMatrix::<C64>::zeros(n, n);
        for i in 0..o {
            for a in 0..v {
                let t = amp.t1[(i, a)];
                k[(o + a, i)] = C64::new(t, 0.0);
                k[(i, o + a)] = C64::new(-t, 0.0);
            }
        }
        Some(expm_anti_hermitian(&k))
    } else {
        None
    };
    LucjParams { n_orb: n, layers, final_rotation }
}

/// Coefficients in the (α string, β string) product basis.
struct SectorState {
    alphas: Vec<u32>,
    betas: Vec<u32>,
    c: DMatrix<C64>,
}

impl SectorState {
    fn hartree_fock(n: usize, na: usize, nb: usize) -> Self {
        let alphas = combinations(n, na);
        let betas = combinations(n, nb);
        let mut c = DMatrix::zeros(alphas.len(), betas.len());
        c[(0, 0)] = C64::new(1.0, 0.0);
        Self { alphas, betas, c }
    }

    fn rotate(&mut self, u: &DMatrix<C64>) {
        let la = exterior_power(u, &self.alphas);
        let lb = exterior_power(u, &self.betas);
        self.c = &la * &self.c * lb.transpose();
    }

    fn jastrow(&mut self, l: &LucjLayer) {
        for (x, &a) in self.alphas.iter().enumerate() {
            for (y, &b) in self.betas.iter().enumerate() {
                let phi = jastrow_phase(l, a, b);
                self.c[(x, y)] *= C64::from_polar(1.0, phi);
            }
        }
    }

    fn to_statevector(&self, n: usize) -> Result<Statevector> {
        let mut s = Statevector::zero(2 * n)?;
        s.amps[0] = C64::new(0.0, 0.0);
        for (x, &a) in self.alphas.iter().enumerate() {
            for (y, &b) in self.betas.iter().enumerate() {
                s.amps[(a as usize) | ((b as usize) << n)] = self.c[(x, y)];
            }
        }
        Ok(s)
    }
}

fn jastrow_phase(l: &LucjLayer, a: u32, b: u32) -> f64 {
    let mut phi = 0.0;
    for p in bits(a) {
        for q in bits(a) {
            phi += 0.5 * l.j_aa[(p, q)];
        }
        for q in bits(b) {
            phi += l.j_ab[(p, q)];
        }
    }
    for p in bits(b) {
        for q in bits(b) {
            phi += 0.5 * l.j_aa[(p, q)];
        }
    }
    phi
}

/// U|HF⟩ with exact orbital rotations and diagonal Jastrow phases.
pub fn prepare_lucj_state(n_orb: usize, n_alpha: usize, n_beta: usize, params: &LucjParams) -> Result<Statevector> {
    if 2 * n_orb > MAX_QUBITS {
        return Err(Error::Invalid(format!("{} qubits exceed the {MAX_QUBITS}-qubit limit", 2 * n_orb)));
    }
    if params.n_orb != n_orb || n_alpha > n_orb || n_beta > n_orb {
        return Err(Error::Dimension("LUCJ parameters / orbital count".into()));
    }
    params.validate()?;
    let mut s = SectorState::hartree_fock(n_orb, n_alpha, n_beta);
    for l in &params.layers {
        let u = l.rotation();
        s.rotate(&u.adjoint());
        s.jastrow(l);
        s.rotate(&u);
    }
    if let Some(u) = &params.final_rotation {
        s.rotate(u);
    }
    s.to_statevector(n_orb)
}

/// Apply the single-particle rotation `u` in both spin blocks as gates.
pub fn push_rotation(c: &mut Circuit, n_orb: usize, u: &DMatrix<C64>) {
    let (ops, phases) = givens_decomposition(u);
    for off in [0, n_orb] {
        for (p, d) in phases.iter().enumerate() {
            let phi = d.arg();
            if phi.abs() > 1e-14 {
                c.push(Gate::Phase(off + p, phi));
            }
        }
        for (q, g) in &ops {
            c.push(Gate::Givens { q: off + q, u: *g });
        }
    }
}

fn push_jastrow(c: &mut Circuit, n: usize, l: &LucjLayer) {
    for off in [0, n] {
        for p in 0..n {
            if l.j_aa[(p, p)] != 0.0 {
                c.push(Gate::Phase(off + p, 0.5 * l.j_aa[(p, p)]));
            }
            for q in p + 1..n {
                if l.j_aa[(p, q)] != 0.0 {
                    c.push(Gate::CPhase(off + p, off + q, l.j_aa[(p, q)]));
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            if l.j_ab[(p, q)] != 0.0 {
                c.push(Gate::CPhase(p, n + q, l.j_ab[(p, q)]));
            }
        }
    }
}

/// Gate-level LUCJ circuit including the Hartree–Fock bit flips.
pub fn lucj_circuit(n_orb: usize, n_alpha: usize, n_beta: usize, params: &LucjParams) -> Circuit {
    let mut c = Circuit::new(2 * n_orb);
    c.n_params = params.n_params();
    for p in 0..n_alpha {
        c.push(Gate::X(p));
    }
    for p in 0..n_beta {
        c.push(Gate::X(n_orb + p));
    }
    for l in &params.layers {
        let u = l.rotation();
        push_rotation(&mut c, n_orb, &u.adjoint());
        push_jastrow(&mut c, n_orb, l);
        push_rotation(&mut c, n_orb, &u);
    }
    if let Some(u) = &params.final_rotation {
        push_rotation(&mut c, n_orb, u);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scf::AmplitudeSource;

    fn random_amplitudes(o: usize, v: usize, seed: u64) -> Amplitudes {
        let mut amp = Amplitudes::zeros(o, v, AmplitudeSource::External);
        let mut x = seed as f64 * 0.618;
        let mut next = || {
            x = (x * 9.73 + 0.31).fract();
            x - 0.5
        };
        for i in 0..o {
            for j in 0..o {
                for a in 0..v {
                    for b in 0..v {
                        let t = 0.2 * next();
                        amp.t2.add(i, j, a, b, t);
                        amp.t2.add(j, i, b, a, t);
                    }
                }
            }
            for a in 0..v {
                amp.t1[(i, a)] = 0.05 * next();
            }
        }
        amp
    }

    #[test]
    fn zero_amplitudes_give_hartree_fock() {
        let amp = Amplitudes::zeros(2, 2, AmplitudeSource::Mp2);
        let p = lucj_params_from_t2(&amp, 1, Connectivity::Full);
        assert!(p.layers[0].t.iter().all(|x| x.norm() == 0.0));
        let s = prepare_lucj_state(4, 2, 2, &p).unwrap();
        let hf = Statevector::hartree_fock(4, 2, 2).unwrap();
        assert!((s.inner(&hf).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gate_path_matches_operator_path() {
        let amp = random_amplitudes(2, 2, 3);
        for reps in [1, 2, 3] {
            let p = lucj_params_from_t2(&amp, reps, Connectivity::Full);
            let exact = prepare_lucj_state(4, 2, 2, &p).unwrap();
            let mut s = Statevector::zero(8).unwrap();
            lucj_circuit(4, 2, 2, &p).run(&mut s);
            let diff: f64 = exact.amps.iter().zip(&s.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-10, "reps {reps}: {diff}");
            assert!((exact.sector_probability(2, 2) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ladder_connectivity_prunes_pairs() {
        let amp = random_amplitudes(2, 2, 5);
        let p = lucj_params_from_t2(&amp, 1, Connectivity::Ladder);
        let l = &p.layers[0];
        assert_eq!(l.j_aa[(0, 3)], 0.0);
        assert_eq!(l.j_ab[(0, 1)], 0.0);
        assert!(l.j_ab[(1, 1)] != 0.0);
    }
}
