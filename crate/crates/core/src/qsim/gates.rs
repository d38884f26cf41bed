use super::state::{Statevector, C64};

/// Gates of the sample-generating circuits. Qubit arguments are register
/// indices; angles in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    Ry(usize, f64),
    /// diag(1, e^{iφ}).
    Phase(usize, f64),
    /// Control, target.
    Cx(usize, usize),
    /// diag(1, 1, 1, e^{iφ}).
    CPhase(usize, usize, f64),
    /// Control, target, angle.
    CRy(usize, usize, f64),
    /// Ry on `target` conditioned on each control being 1 (closed) or 0 (open).
    McRy {
        target: usize,
        controls: Vec<(usize, bool)>,
        theta: f64,
    },
    /// Number-conserving two-mode rotation on adjacent modes (q, q + 1):
    /// the one-particle block is `u` (column j is the image of mode j) and
    /// the doubly occupied state picks up det(u).
    Givens { q: usize, u: [[C64; 2]; 2] },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Ry(q, _) | Gate::Phase(q, _) => vec![*q],
            Gate::Cx(a, b) | Gate::CPhase(a, b, _) | Gate::CRy(a, b, _) => vec![*a, *b],
            Gate::McRy { target, controls, .. } => {
                let mut v: Vec<usize> = controls.iter().map(|c| c.0).collect();
                v.push(*target);
                v
            }
            Gate::Givens { q, .. } => vec![*q, q + 1],
        }
    }

    pub fn is_parametrized(&self) -> bool {
        matches!(self, Gate::Ry(..) | Gate::CRy(..) | Gate::McRy { .. })
    }
}

/// An ordered gate list on a fixed register.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// Number of free ansatz parameters the circuit was built from.
    pub n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn run(&self, state: &mut Statevector) {
        for g in &self.gates {
            apply_gate(state, g);
        }
    }
}

fn rot_pair(a: C64, b: C64, theta: f64) -> (C64, C64) {
    let (s, c) = (0.5 * theta).sin_cos();
    (a * c - b * s, a * s + b * c)
}

/// Apply a single gate in place.
pub fn apply_gate(state: &mut Statevector, g: &Gate) {
    let amps = &mut state.amps;
    let dim = amps.len();
    let i = C64::new(0.0, 1.0);
    match g {
        Gate::X(q) => {
            let m = 1 << q;
            for x in 0..dim {
                if x & m == 0 {
                    amps.swap(x, x | m);
                }
            }
        }
        Gate::Y(q) => {
            let m = 1 << q;
            for x in 0..dim {
                if x & m == 0 {
                    let (a0, a1) = (amps[x], amps[x | m]);
                    amps[x] = -i * a1;
                    amps[x | m] = i * a0;
                }
            }
        }
        Gate::Z(q) => {
            let m = 1 << q;
            for (x, a) in amps.iter_mut().enumerate() {
                if x & m != 0 {
                    *a = -*a;
                }
            }
        }
        Gate::Ry(q, theta) => {
            let m = 1 << q;
            for x in 0..dim {
                if x & m == 0 {
                    let (a0, a1) = rot_pair(amps[x], amps[x | m], *theta);
                    amps[x] = a0;
                    amps[x | m] = a1;
                }
            }
        }
        Gate::Phase(q, phi) => {
            let m = 1 << q;
            let p = C64::from_polar(1.0, *phi);
            for (x, a) in amps.iter_mut().enumerate() {
                if x & m != 0 {
                    *a *= p;
                }
            }
        }
        Gate::Cx(c, t) => {
            let (mc, mt) = (1 << c, 1 << t);
            for x in 0..dim {
                if x & mc != 0 && x & mt == 0 {
                    amps.swap(x, x | mt);
                }
            }
        }
        Gate::CPhase(a, b, phi) => {
            let m = (1 << a) | (1 << b);
            let p = C64::from_polar(1.0, *phi);
            for (x, v) in amps.iter_mut().enumerate() {
                if x & m == m {
                    *v *= p;
                }
            }
        }
        Gate::CRy(c, t, theta) => {
            let (mc, mt) = (1 << c, 1 << t);
            for x in 0..dim {
                if x & mc != 0 && x & mt == 0 {
                    let (a0, a1) = rot_pair(amps[x], amps[x | mt], *theta);
                    amps[x] = a0;
                    amps[x | mt] = a1;
                }
            }
        }
        Gate::McRy { target, controls, theta } => {
            let mt = 1 << target;
            for x in 0..dim {
                if x & mt != 0 {
                    continue;
                }
                if controls.iter().all(|&(q, closed)| (x >> q & 1 == 1) == closed) {
                    let (a0, a1) = rot_pair(amps[x], amps[x | mt], *theta);
                    amps[x] = a0;
                    amps[x | mt] = a1;
                }
            }
        }
        Gate::Givens { q, u } => {
            let (m0, m1) = (1 << q, 1 << (q + 1));
            let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
            for x in 0..dim {
                if x & (m0 | m1) != 0 {
                    continue;
                }
                let (x0, x1, x11) = (x | m0, x | m1, x | m0 | m1);
                let (c0, c1) = (amps[x0], amps[x1]);
                amps[x0] = u[0][0] * c0 + u[0][1] * c1;
                amps[x1] = u[1][0] * c0 + u[1][1] * c1;
                amps[x11] *= det;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qeb_single_splits_amplitude() {
        // |q_a q_i⟩ = |01⟩ with a = 1, i = 0.
        let mut s = Statevector::basis(2, 0b01).unwrap();
        let theta = 0.7;
        for g in [Gate::Cx(1, 0), Gate::CRy(0, 1, theta), Gate::Cx(1, 0)] {
            apply_gate(&mut s, &g);
        }
        assert!((s.amps[0b01].re - (0.5 * theta).cos()).abs() < 1e-14);
        assert!((s.amps[0b10].re - (0.5 * theta).sin()).abs() < 1e-14);
    }
}
