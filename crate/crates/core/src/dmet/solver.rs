//! Impurity solvers: CASCI, CCSD and SQD on the truncated active space.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cc_density::ccsd_densities;
use super::embedding::{embed_rdms, fragment_energy, truncate_active_space, EmbeddingProblem};
use crate::detspace::{compute_rdms, fci_ground_state, DavidsonOptions};
use crate::linalg::Tensor4;
use crate::qsim::{lucj_params_from_t2, prepare_lucj_state, sample_counts, Connectivity, NoiseModel};
use crate::scf::{ccsd_solve, CcsdOptions};
use crate::seeds::derive_seed;
use crate::sqd::{run_sqd_with_state, SQDConfig, SamplesPerBatch};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    Casci,
    Ccsd,
    Sqd,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "casci" | "fci" => Ok(SolverKind::Casci),
            "ccsd" => Ok(SolverKind::Ccsd),
            "sqd" => Ok(SolverKind::Sqd),
            other => Err(Error::Invalid(format!("unknown impurity solver `{other}`"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Casci => "casci",
            SolverKind::Ccsd => "ccsd",
            SolverKind::Sqd => "sqd",
        })
    }
}

/// Solver settings shared by every fragment.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// HOMO/LUMO window; `None` keeps every impurity orbital.
    pub window: Option<(usize, usize)>,
    pub n_shots: u64,
    pub lucj_reps: usize,
    pub noise: NoiseModel,
    pub sqd: SQDConfig,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Casci,
            window: Some((4, 4)),
            n_shots: 10_000,
            lucj_reps: 1,
            noise: NoiseModel::noiseless(),
            sqd: SQDConfig {
                samples_per_batch: SamplesPerBatch::Fixed(100_000),
                ..SQDConfig::default()
            },
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ImpuritySolution {
    pub e_fragment: f64,
    /// Trace of the 1-RDM over fragment orbitals.
    pub n_fragment: f64,
    pub n_orb_act: usize,
    pub n_ele_act: usize,
    /// Active-space energy including the folded core.
    pub e_active: f64,
    pub eta_sub: Option<f64>,
}

/// Solve one impurity at chemical potential `mu`.
pub fn solve_impurity(emb: &EmbeddingProblem, mu: f64, cfg: &SolverConfig) -> Result<ImpuritySolution> {
    let err = |e: Error| Error::Dmet {
        fragment: emb.fragment_id,
        message: e.to_string(),
    };
    let imp = emb.hamiltonian(mu);
    let (ko, kv) = cfg.window.unwrap_or((emb.n_orb(), emb.n_orb()));
    let act = truncate_active_space(&imp, emb.n_electrons, ko, kv).map_err(err)?;
    let nocc = act.n_electrons / 2;
    let davidson = DavidsonOptions::default();
    let (d1a, d2a, e_active, eta_sub): (DMatrix<f64>, Tensor4, f64, Option<f64>) = match cfg.kind {
        SolverKind::Casci => {
            let (space, r) = fci_ground_state(&act.mo, nocc, nocc, &davidson).map_err(err)?;
            let rdm = compute_rdms(&r.ground_vector, &space, true);
            (rdm.dm1(), rdm.dm2.expect("requested"), r.e_total, None)
        }
        SolverKind::Ccsd => {
            let cc = ccsd_solve(&act.mo, &act.eps, nocc, &CcsdOptions::default()).map_err(err)?;
            let d = ccsd_densities(&act.mo, &act.eps, nocc, &cc).map_err(err)?;
            (d.rdms.dm1(), d.rdms.dm2.expect("requested"), cc.e_total, None)
        }
        SolverKind::Sqd => {
            let cc = ccsd_solve(&act.mo, &act.eps, nocc, &CcsdOptions::default()).map_err(err)?;
            let params = lucj_params_from_t2(&cc.amplitudes, cfg.lucj_reps, Connectivity::Full);
            let state = prepare_lucj_state(act.n_orb(), nocc, nocc, &params).map_err(err)?;
            let seed = derive_seed(cfg.seed, emb.fragment_id as u64, 0x444d_4554);
            let counts = sample_counts(&state, cfg.n_shots, seed, &cfg.noise).map_err(err)?;
            let sqd_cfg = SQDConfig { seed, ..cfg.sqd.clone() };
            let (res, st) = run_sqd_with_state(&counts, &act.mo, nocc, nocc, &sqd_cfg).map_err(err)?;
            let rdm = compute_rdms(&st.vector, &st.space, true);
            (rdm.dm1(), rdm.dm2.expect("requested"), res.e_sqd, Some(res.ratios.eta_sub))
        }
    };
    let (d1, d2) = embed_rdms(&act, &d1a, &d2a);
    let tr = d1.trace();
    if (tr - emb.n_electrons as f64).abs() > 1e-6 {
        return Err(Error::Dmet {
            fragment: emb.fragment_id,
            message: format!("impurity 1-RDM trace {tr:.9} vs {} electrons", emb.n_electrons),
        });
    }
    Ok(ImpuritySolution {
        e_fragment: fragment_energy(emb, &d1, &d2),
        n_fragment: (0..emb.n_frag()).map(|i| d1[(i, i)]).sum(),
        n_orb_act: act.n_orb(),
        n_ele_act: act.n_electrons,
        e_active,
        eta_sub,
    })
}
