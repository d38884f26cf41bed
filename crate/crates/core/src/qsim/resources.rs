//! Logical resource estimates on a star-coupled device.
//!
//! Every gate is lowered to single-qubit rotations (R) and CZ with a fixed
//! cost model:
//!
//! | gate                 | R             | CZ  |
//! |----------------------|---------------|-----|
//! | X, Y, Z, Ry, Phase   | 1             | 0   |
//! | CX                   | 2             | 1   |
//! | CPhase               | 7             | 2   |
//! | Givens, CRy          | 6             | 2   |
//! | k-controlled Ry      | 3·2^k (+2 per open control) | 2^k |
//!
//! A CZ runs between one qubit resident in the central resonator and one
//! other qubit. Loading a qubit costs a MOVE in and a MOVE out; consecutive
//! CZs that share the resident qubit reuse it. A single-qubit gate on the
//! resident qubit forces it out first. Depth is the ASAP layer count of
//! the lowered sequence, with the resonator as an extra shared resource.

use serde::{Deserialize, Serialize};

use super::gates::{Circuit, Gate};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub n_qubits: usize,
    pub n_params: usize,
    pub r: usize,
    pub cz: usize,
    pub moves: usize,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Native {
    R(usize),
    Cz(usize, usize),
    Move(usize),
}

fn two_qubit(out: &mut Vec<Native>, a: usize, b: usize, pattern: &[usize]) {
    // pattern[k] rotations on b precede the k-th CZ; the remainder trail.
    for (k, &r) in pattern.iter().enumerate() {
        for x in 0..r {
            out.push(Native::R(if x % 2 == 0 { b } else { a }));
        }
        if k + 1 < pattern.len() {
            out.push(Native::Cz(a, b));
        }
    }
}

fn lower(g: &Gate, out: &mut Vec<Native>) {
    match g {
        Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Ry(q, _) | Gate::Phase(q, _) => out.push(Native::R(*q)),
        Gate::Cx(c, t) => two_qubit(out, *c, *t, &[1, 1]),
        Gate::CPhase(a, b, _) => two_qubit(out, *a, *b, &[3, 2, 2]),
        Gate::CRy(c, t, _) => two_qubit(out, *c, *t, &[2, 2, 2]),
        Gate::Givens { q, .. } => two_qubit(out, *q, q + 1, &[2, 2, 2]),
        Gate::McRy { target, controls, .. } => {
            let k = controls.len();
            for &(q, closed) in controls {
                if !closed {
                    out.push(Native::R(q));
                }
            }
            for s in 0..1usize << k {
                // Gray-code step: the control whose bit changes.
                let c = controls[(s + 1).trailing_zeros().min(k as u32 - 1) as usize].0;
                out.push(Native::R(*target));
                out.push(Native::Cz(c, *target));
                out.push(Native::R(*target));
                out.push(Native::R(*target));
            }
            for &(q, closed) in controls {
                if !closed {
                    out.push(Native::R(q));
                }
            }
        }
    }
}

fn star_route(ops: &[Native]) -> Vec<Native> {
    let mut out = Vec::with_capacity(ops.len() * 2);
    let mut resident: Option<usize> = None;
    for (k, op) in ops.iter().enumerate() {
        match *op {
            Native::R(q) => {
                if resident == Some(q) {
                    out.push(Native::Move(q));
                    resident = None;
                }
                out.push(*op);
            }
            Native::Cz(a, b) => {
                if resident != Some(a) && resident != Some(b) {
                    if let Some(r) = resident.take() {
                        out.push(Native::Move(r));
                    }
                    let next = ops[k + 1..].iter().find_map(|o| match o {
                        Native::Cz(x, y) => Some((*x, *y)),
                        _ => None,
                    });
                    let load = match next {
                        Some((x, y)) if (x == b || y == b) && x != a && y != a => b,
                        _ => a,
                    };
                    out.push(Native::Move(load));
                    resident = Some(load);
                }
                out.push(*op);
            }
            Native::Move(_) => out.push(*op),
        }
    }
    if let Some(r) = resident {
        out.push(Native::Move(r));
    }
    out
}

fn asap_depth(ops: &[Native], n_qubits: usize) -> usize {
    let mut avail = vec![0usize; n_qubits + 1];
    let res = n_qubits;
    let mut depth = 0;
    for op in ops {
        let rs: Vec<usize> = match *op {
            Native::R(q) => vec![q],
            Native::Cz(a, b) => vec![a, b, res],
            Native::Move(q) => vec![q, res],
        };
        let layer = rs.iter().map(|&r| avail[r]).max().unwrap_or(0) + 1;
        for r in rs {
            avail[r] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}

pub fn estimate_resources(c: &Circuit) -> ResourceReport {
    let mut logical = Vec::new();
    for g in &c.gates {
        lower(g, &mut logical);
    }
    let routed = star_route(&logical);
    let mut rep = ResourceReport {
        n_qubits: c.n_qubits,
        n_params: c.n_params,
        depth: asap_depth(&routed, c.n_qubits),
        ..Default::default()
    };
    for op in &routed {
        match op {
            Native::R(_) => rep.r += 1,
            Native::Cz(..) => rep.cz += 1,
            Native::Move(_) => rep.moves += 1,
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit() {
        let r = estimate_resources(&Circuit::new(4));
        assert_eq!((r.r, r.cz, r.moves, r.depth), (0, 0, 0, 0));
    }

    #[test]
    fn single_cz() {
        assert_eq!(star_route(&[Native::Cz(0, 1)]).len(), 3);
        let mut c = Circuit::new(2);
        c.push(Gate::Cx(0, 1));
        let r = estimate_resources(&c);
        assert_eq!((r.r, r.cz, r.moves), (2, 1, 2));
    }

    #[test]
    fn shared_resident_merges_moves() {
        let ops = [Native::Cz(0, 1), Native::Cz(0, 2), Native::Cz(3, 0)];
        let routed = star_route(&ops);
        assert_eq!(routed.iter().filter(|o| matches!(o, Native::Move(_))).count(), 2);
    }

    #[test]
    fn cost_model_counts() {
        let mut c = Circuit::new(4);
        c.push(Gate::CPhase(0, 1, 0.1));
        c.push(Gate::McRy {
            target: 3,
            controls: vec![(0, false), (1, true), (2, false)],
            theta: 0.2,
        });
        let r = estimate_resources(&c);
        assert_eq!(r.cz, 2 + 8);
        assert_eq!(r.r, 7 + 24 + 4);
    }
}
