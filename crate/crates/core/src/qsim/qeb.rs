//! Qubit-excitation-based UCCSD with CNOT-ladder excitation gates.
//!
//! Excitations act on register qubits (spin orbitals in Jordan–Wigner
//! order). A single (i, a) is CX(a→i) · CRy(i→a, θ) · CX(a→i); a double
//! (i, j, a, b) is the three-CNOT ladder, an Ry on b controlled by
//! a = 0, j = 1, i = 0, and the mirrored ladder. Both rotate
//! |occupied⟩ → cos(θ/2)|occupied⟩ + sin(θ/2)|excited⟩ and leave every
//! other pattern of the involved qubits unchanged.
//!
//! The product is ordered singles first, then doubles, each in
//! lexicographic order of the qubit tuple. Gates do not commute, so the
//! ordering is part of the ansatz.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::gates::{Circuit, Gate};
use super::state::{Statevector, MAX_QUBITS};
use crate::scf::Amplitudes;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QebSingle {
    pub i: usize,
    pub a: usize,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QebDouble {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub theta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QebParams {
    pub singles: Vec<QebSingle>,
    pub doubles: Vec<QebDouble>,
}

impl QebParams {
    pub fn n_params(&self) -> usize {
        self.singles.len() + self.doubles.len()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in &self.singles {
            if s.i >= n_qubits || s.a >= n_qubits {
                return Err(Error::Invalid(format!("single ({}, {}) out of range", s.i, s.a)));
            }
            if s.i == s.a {
                return Err(Error::Invalid(format!("single ({}, {}) reuses a qubit", s.i, s.a)));
            }
            if !seen.insert(vec![s.i, s.a]) {
                return Err(Error::Invalid(format!("duplicate single ({}, {})", s.i, s.a)));
            }
        }
        for d in &self.doubles {
            let q = [d.i, d.j, d.a, d.b];
            if q.iter().any(|&x| x >= n_qubits) {
                return Err(Error::Invalid(format!("double {q:?} out of range")));
            }
            let set: BTreeSet<usize> = q.iter().copied().collect();
            if set.len() != 4 {
                return Err(Error::Invalid(format!("double {q:?} reuses a qubit")));
            }
            if !seen.insert(q.to_vec()) {
                return Err(Error::Invalid(format!("duplicate double {q:?}")));
            }
        }
        Ok(())
    }
}

/// Spin-conserving excitations from the closed-shell reference, as qubit
/// tuples: singles (i, a), then doubles (i, j, a, b) with i < j, a < b.
pub fn qeb_excitations(n_orb: usize, n_alpha: usize, n_beta: usize) -> (Vec<[usize; 2]>, Vec<[usize; 4]>) {
    let spin = |q: usize| q / n_orb;
    let occ: Vec<usize> = (0..n_alpha).chain(n_orb..n_orb + n_beta).collect();
    let virt: Vec<usize> = (n_alpha..n_orb).chain(n_orb + n_beta..2 * n_orb).collect();
    let mut singles = Vec::new();
    for &i in &occ {
        for &a in &virt {
            if spin(i) == spin(a) {
                singles.push([i, a]);
            }
        }
    }
    let mut doubles = Vec::new();
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    let mut s_occ = [spin(i), spin(j)];
                    let mut s_vir = [spin(a), spin(b)];
                    s_occ.sort();
                    s_vir.sort();
                    if s_occ == s_vir {
                        doubles.push([i, j, a, b]);
                    }
                }
            }
        }
    }
    singles.sort();
    doubles.sort();
    (singles, doubles)
}

/// Map a register qubit to the interleaved spin-orbital index used by
/// [`Amplitudes`] (separate occupied and virtual blocks).
fn interleaved(q: usize, n_orb: usize, n_occ: usize) -> usize {
    let (p, s) = (q % n_orb, q / n_orb);
    if p < n_occ {
        2 * p + s
    } else {
        2 * (p - n_occ) + s
    }
}

/// Parameters initialized from amplitudes: θ = 2t for every excitation.
/// MP2 amplitudes have t1 = 0, so singles start at zero.
pub fn qeb_params_from_amplitudes(amp: &Amplitudes, n_orb: usize) -> QebParams {
    let n_occ = amp.n_occ;
    let (singles, doubles) = qeb_excitations(n_orb, n_occ, n_occ);
    let ix = |q| interleaved(q, n_orb, n_occ);
    QebParams {
        singles: singles
            .into_iter()
            .map(|[i, a]| QebSingle { i, a, theta: 2.0 * amp.t1_spin(ix(i), ix(a)) })
            .collect(),
        doubles: doubles
            .into_iter()
            .map(|[i, j, a, b]| QebDouble {
                i,
                j,
                a,
                b,
                theta: 2.0 * amp.t2_spin(ix(i), ix(j), ix(a), ix(b)),
            })
            .collect(),
    }
}

pub fn push_single(c: &mut Circuit, s: &QebSingle) {
    c.push(Gate::Cx(s.a, s.i));
    c.push(Gate::CRy(s.i, s.a, s.theta));
    c.push(Gate::Cx(s.a, s.i));
}

pub fn push_double(c: &mut Circuit, d: &QebDouble) {
    let (i, j, a, b) = (d.i, d.j, d.a, d.b);
    c.push(Gate::Cx(b, a));
    c.push(Gate::Cx(j, i));
    c.push(Gate::Cx(b, j));
    c.push(Gate::McRy {
        target: b,
        controls: vec![(a, false), (j, true), (i, false)],
        theta: d.theta,
    });
    c.push(Gate::Cx(b, j));
    c.push(Gate::Cx(j, i));
    c.push(Gate::Cx(b, a));
}

pub fn qeb_circuit(n_orb: usize, n_alpha: usize, n_beta: usize, params: &QebParams) -> Result<Circuit> {
    let nq = 2 * n_orb;
    if nq > MAX_QUBITS {
        return Err(Error::Invalid(format!("{nq} qubits exceed the {MAX_QUBITS}-qubit limit")));
    }
    params.validate(nq)?;
    let mut c = Circuit::new(nq);
    c.n_params = params.n_params();
    for p in 0..n_alpha {
        c.push(Gate::X(p));
    }
    for p in 0..n_beta {
        c.push(Gate::X(n_orb + p));
    }
    for s in &params.singles {
        push_single(&mut c, s);
    }
    for d in &params.doubles {
        push_double(&mut c, d);
    }
    Ok(c)
}

pub fn prepare_lcnot_uccsd_state(n_orb: usize, n_alpha: usize, n_beta: usize, params: &QebParams) -> Result<Statevector> {
    let c = qeb_circuit(n_orb, n_alpha, n_beta, params)?;
    let mut s = Statevector::zero(c.n_qubits)?;
    c.run(&mut s);
    Ok(s)
}
