//! One-shot density matrix embedding.
//!
//! The RHF density is expressed in localized orbitals; each fragment gets a
//! Schmidt bath from the environment block of that density. Impurity
//! problems are truncated to a HOMO/LUMO window and handed to a solver. A
//! global chemical potential μ on the fragment orbitals is tuned until the
//! fragment electron counts add up to N. The bath is never updated.

pub mod cc_density;
pub mod embedding;
pub mod fragments;
pub mod localize;
pub mod solver;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use cc_density::{ccsd_densities, CcDensities};
pub use embedding::{
    build_embedding, embed_rdms, fragment_energy, truncate_active_space, ActiveSpace, EmbeddingProblem,
    LocalizedReference, BATH_DELTA,
};
pub use fragments::{atom_groups, fragment_orbitals, validate_partition, FragmentScheme};
pub use localize::{localize, Localization};
pub use solver::{solve_impurity, ImpuritySolution, SolverConfig, SolverKind};

use crate::par;
use crate::pipeline::Problem;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct DmetConfig {
    pub localization: Localization,
    pub fragments: FragmentScheme,
    pub solver: SolverConfig,
    /// Tolerance on |Σ_A N_A − N|.
    pub mu_tol: f64,
    pub mu_step: f64,
    pub max_outer: usize,
}

impl Default for DmetConfig {
    fn default() -> Self {
        Self {
            localization: Localization::MetaLowdin,
            fragments: FragmentScheme::Atoms,
            solver: SolverConfig::default(),
            mu_tol: 1e-8,
            mu_step: 0.1,
            max_outer: 30,
        }
    }
}

/// One evaluation of every fragment at a given μ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmetIteration {
    pub iteration: usize,
    pub mu: f64,
    /// Σ_A N_A − N.
    pub n_error: f64,
    pub e_total: f64,
    pub fragment_energies: Vec<f64>,
    pub eta_sub: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DMETResult {
    pub e_total: f64,
    pub mu: f64,
    pub converged: bool,
    pub n_iterations: usize,
    pub solver: SolverKind,
    pub fragment_energies: Vec<f64>,
    pub eta_sub: Vec<Option<f64>>,
    /// (n_orb, n_ele) of each active space.
    pub active_spaces: Vec<(usize, usize)>,
    pub n_bath: Vec<usize>,
    pub trace: Vec<DmetIteration>,
}

impl DMETResult {
    pub fn mu_trajectory(&self) -> Vec<f64> {
        self.trace.iter().map(|t| t.mu).collect()
    }

    /// CSV: iteration, mu, n_error, e_total, e_frag_k…, eta_sub_k…
    pub fn write_trace<W: Write>(&self, mut w: W) -> Result<()> {
        let nf = self.fragment_energies.len();
        let mut head = vec!["iteration".to_string(), "mu".into(), "n_error".into(), "e_total".into()];
        head.extend((0..nf).map(|k| format!("e_frag_{k}")));
        head.extend((0..nf).map(|k| format!("eta_sub_{k}")));
        writeln!(w, "{}", head.join(","))?;
        for t in &self.trace {
            let mut row = vec![
                t.iteration.to_string(),
                format!("{:.12e}", t.mu),
                format!("{:.6e}", t.n_error),
                format!("{:.12}", t.e_total),
            ];
            row.extend(t.fragment_energies.iter().map(|e| format!("{e:.12}")));
            row.extend(t.eta_sub.iter().map(|e| e.map(|x| format!("{x:.6}")).unwrap_or_default()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_trace_file(&self, path: &Path) -> Result<()> {
        self.write_trace(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// All fragments of a molecule at μ = 0, ready for the μ loop.
#[derive(Clone, Debug)]
pub struct DmetProblem {
    pub problems: Vec<EmbeddingProblem>,
    pub n_electrons: usize,
    pub e_nuc: f64,
}

impl DmetProblem {
    pub fn build(p: &Problem, cfg: &DmetConfig) -> Result<Self> {
        if !p.rhf.converged {
            return Err(Error::Invalid("RHF not converged".into()));
        }
        let x = localize(&p.molecule, p.basis, &p.ao.s, cfg.localization)?;
        let reference = LocalizedReference::new(&p.ao, x, &p.rhf.mo_coeffs, p.rhf.n_occ);
        let groups = atom_groups(&p.molecule, &cfg.fragments)?;
        let frags = fragment_orbitals(&groups, &p.ao.ao_atom_map);
        let problems = frags
            .iter()
            .enumerate()
            .map(|(k, f)| build_embedding(&p.ao, &reference, k, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problems,
            n_electrons: p.molecule.n_electrons(),
            e_nuc: p.ao.e_nuc,
        })
    }

    /// Solve every fragment at `mu`.
    pub fn evaluate(&self, mu: f64, solver: &SolverConfig) -> Result<Vec<ImpuritySolution>> {
        par::map_slice(&self.problems, |e| solve_impurity(e, mu, solver))
            .into_iter()
            .collect()
    }
}

fn record(iteration: usize, mu: f64, n: usize, e_nuc: f64, sols: &[ImpuritySolution]) -> DmetIteration {
    let n_tot: f64 = sols.iter().map(|s| s.n_fragment).sum();
    DmetIteration {
        iteration,
        mu,
        n_error: n_tot - n as f64,
        e_total: sols.iter().map(|s| s.e_fragment).sum::<f64>() + e_nuc,
        fragment_energies: sols.iter().map(|s| s.e_fragment).collect(),
        eta_sub: sols.iter().map(|s| s.eta_sub).collect(),
    }
}

/// Root-find Σ_A N_A(μ) = N: start at μ = 0, expand a bracket in steps of
/// `mu_step`, then safeguarded secant (bisection when the secant leaves the
/// bracket). Stops when |f| < tol or the bracket is below 1e-10.
pub fn optimize_chemical_potential(problem: &DmetProblem, cfg: &DmetConfig) -> Result<DMETResult> {
    let mut trace: Vec<DmetIteration> = Vec::new();
    let mut sols_at: Vec<Vec<ImpuritySolution>> = Vec::new();
    let mut eval = |mu: f64, trace: &mut Vec<DmetIteration>| -> Result<f64> {
        if trace.len() >= cfg.max_outer {
            return Err(Error::NotConverged {
                method: "DMET chemical potential",
                iterations: cfg.max_outer,
                last_energy: trace.last().map(|t| t.e_total).unwrap_or(f64::NAN),
            });
        }
        let sols = problem.evaluate(mu, &cfg.solver)?;
        let rec = record(trace.len(), mu, problem.n_electrons, problem.e_nuc, &sols);
        let f = rec.n_error;
        trace.push(rec);
        sols_at.push(sols);
        Ok(f)
    };
    let tol = cfg.mu_tol;
    let mut converged = false;
    let (mut a, mut fa) = (0.0, eval(0.0, &mut trace)?);
    if fa.abs() < tol {
        converged = true;
    } else {
        let dir = if fa > 0.0 { -1.0 } else { 1.0 };
        let (mut b, mut fb);
        loop {
            b = a + dir * cfg.mu_step;
            fb = eval(b, &mut trace)?;
            if fb.abs() < tol {
                converged = true;
                break;
            }
            if fa.signum() != fb.signum() {
                break;
            }
            a = b;
            fa = fb;
        }
        // Bracket [a, b] with f(a), f(b) of opposite sign; (x0, f0) and
        // (x1, f1) are the two latest points for the secant.
        let (mut x0, mut f0, mut x1, mut f1) = (a, fa, b, fb);
        while !converged {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if hi - lo < 1e-10 {
                converged = true;
                break;
            }
            let mut x = if f1 != f0 { x1 - f1 * (x1 - x0) / (f1 - f0) } else { f64::NAN };
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let fx = eval(x, &mut trace)?;
            if fx.abs() < tol {
                converged = true;
                break;
            }
            if fx.signum() == fa.signum() {
                a = x;
                fa = fx;
            } else {
                b = x;
                fb = fx;
            }
            let _ = fb;
            x0 = x1;
            f0 = f1;
            x1 = x;
            f1 = fx;
        }
    }
    let last = trace.last().expect("one evaluation").clone();
    let sols = sols_at.last().expect("one evaluation");
    Ok(DMETResult {
        e_total: last.e_total,
        mu: last.mu,
        converged,
        n_iterations: trace.len(),
        solver: cfg.solver.kind,
        fragment_energies: last.fragment_energies.clone(),
        eta_sub: last.eta_sub.clone(),
        active_spaces: sols.iter().map(|s| (s.n_orb_act, s.n_ele_act)).collect(),
        n_bath: problem.problems.iter().map(|e| e.n_bath).collect(),
        trace,
    })
}

/// Full pipeline from a prepared molecule.
pub fn run_dmet(p: &Problem, cfg: &DmetConfig) -> Result<DMETResult> {
    let problem = DmetProblem::build(p, cfg)?;
    optimize_chemical_potential(&problem, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detspace::{fci_ground_state, DavidsonOptions};
    use crate::molint::BasisName;
    use crate::systems;

    #[test]
    fn whole_molecule_fragment_is_exact() {
        let p = Problem::new(systems::find("H2O").unwrap().molecule(), BasisName::Sto3g).unwrap();
        let cfg = DmetConfig {
            fragments: FragmentScheme::Whole,
            solver: SolverConfig { window: None, ..SolverConfig::default() },
            ..DmetConfig::default()
        };
        let r = run_dmet(&p, &cfg).unwrap();
        let (_, fci) = fci_ground_state(&p.mo, 5, 5, &DavidsonOptions::default()).unwrap();
        assert!((r.e_total - fci.e_total).abs() < 1e-8, "{} vs {}", r.e_total, fci.e_total);
        assert_eq!(r.n_iterations, 1);
    }

    #[test]
    fn symmetric_h2_fragments_agree() {
        let p = Problem::new(systems::find("H2").unwrap().molecule(), BasisName::Sto3g).unwrap();
        let r = run_dmet(&p, &DmetConfig::default()).unwrap();
        assert!((r.fragment_energies[0] - r.fragment_energies[1]).abs() < 1e-8);
        assert!(r.converged);
        assert_eq!(r.n_bath, vec![1, 1]);
    }

    #[test]
    fn trace_csv_has_one_row_per_iteration() {
        let p = Problem::new(systems::find("H2").unwrap().molecule(), BasisName::Sto3g).unwrap();
        let r = run_dmet(&p, &DmetConfig::default()).unwrap();
        let mut buf = Vec::new();
        r.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + r.trace.len());
        assert!(text.starts_with("iteration,mu,n_error,e_total,e_frag_0,e_frag_1,eta_sub_0"));
    }
}
