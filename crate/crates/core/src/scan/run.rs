//! The scan outer loop: per geometry rebuild integrals, RHF, amplitudes and
//! the ansatz state, then sample and run SQD once per run index.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::grid::{generate_grid, GridPoint, GridSpec, ScanMolecule};
use super::record::{read_records, RecordWriter, ScanRecord};
use crate::detspace::{fci_ground_state, DavidsonOptions};
use crate::molint::BasisName;
use crate::pipeline::Problem;
use crate::qsim::{
    lucj_params_from_t2, prepare_lcnot_uccsd_state, prepare_lucj_state, qeb_params_from_amplitudes, sample_counts,
    Connectivity, NoiseModel, Statevector,
};
use crate::seeds::derive_seed;
use crate::sqd::{run_sqd, SQDConfig};
use crate::{par, Error, Result};

/// Sample-generating circuit family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ansatz {
    /// LUCJ from CCSD t2.
    Lucj { n_reps: usize, connectivity: Connectivity },
    /// Qubit-excitation LCNot-UCCSD from MP2 amplitudes.
    LcnotUccsd,
}

impl Default for Ansatz {
    fn default() -> Self {
        Ansatz::Lucj { n_reps: 1, connectivity: Connectivity::Full }
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ansatz::Lucj { .. } => f.write_str("lucj"),
            Ansatz::LcnotUccsd => f.write_str("qeb"),
        }
    }
}

impl FromStr for Ansatz {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lucj" => Ok(Ansatz::default()),
            "lucj-ladder" => Ok(Ansatz::Lucj { n_reps: 1, connectivity: Connectivity::Ladder }),
            "qeb" | "lcnot" | "lcnot-uccsd" => Ok(Ansatz::LcnotUccsd),
            other => Err(Error::Invalid(format!("unknown ansatz `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub molecule: ScanMolecule,
    pub basis: BasisName,
    pub grid: GridSpec,
    pub runs: usize,
    pub n_shots: u64,
    pub ansatz: Ansatz,
    pub sqd: SQDConfig,
    pub noise: NoiseModel,
    pub output: PathBuf,
    pub master_seed: u64,
    /// Exact reference energy per point.
    pub compute_fci: bool,
    /// When false every timing column is written as zero, making output
    /// byte-reproducible.
    pub record_timings: bool,
    /// Kept for interface parity with hardware queues; the simulator ignores it.
    pub inter_run_sleep_s: f64,
    /// Geometries solved concurrently before their rows are appended.
    pub workers: usize,
    /// Stop after appending this many new rows (simulates an interruption).
    pub max_new_records: Option<usize>,
}

impl ScanConfig {
    /// Tabulated 1D scan, three runs per point.
    pub fn one_d(molecule: ScanMolecule, basis: BasisName, output: impl Into<PathBuf>) -> Self {
        Self {
            molecule,
            basis,
            grid: GridSpec::Table,
            runs: 3,
            n_shots: 10_000,
            ansatz: Ansatz::default(),
            sqd: SQDConfig::default(),
            noise: NoiseModel::noiseless(),
            output: output.into(),
            master_seed: 0,
            compute_fci: true,
            record_timings: true,
            inter_run_sleep_s: 0.0,
            workers: 4,
            max_new_records: None,
        }
    }

    /// The 32 × 32 H₂O surface, one run per point.
    pub fn two_d(output: impl Into<PathBuf>) -> Self {
        Self {
            molecule: ScanMolecule::H2O,
            grid: GridSpec::h2o_full(),
            runs: 1,
            ..Self::one_d(ScanMolecule::H2O, BasisName::Sto3g, output)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Invalid("runs must be at least 1".into()));
        }
        if self.n_shots == 0 {
            return Err(Error::Invalid("n_shots must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Invalid("workers must be at least 1".into()));
        }
        self.sqd.validate()?;
        self.noise.validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanSummary {
    /// Expected rows: grid points × runs.
    pub expected: usize,
    pub written: usize,
    pub skipped: usize,
    /// Error rows in the file after this invocation.
    pub error_rows: usize,
    /// Every (k, run) has a row.
    pub complete: bool,
}

impl ScanSummary {
    /// 0 when complete without errors, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.complete && self.error_rows == 0 {
            0
        } else {
            2
        }
    }
}

struct PointData {
    e_rhf: f64,
    e_ccsd: Option<f64>,
    e_fci: Option<f64>,
    n_alpha: usize,
    n_beta: usize,
    state: Statevector,
    problem: Problem,
    t_int: f64,
    t_ccsd: f64,
}

fn prepare_point(cfg: &ScanConfig, pt: &GridPoint) -> Result<PointData> {
    let problem = Problem::new(pt.molecule.clone(), cfg.basis)?;
    if !problem.rhf.converged {
        return Err(Error::NotConverged {
            method: "RHF",
            iterations: problem.rhf.n_iterations,
            last_energy: problem.rhf.e_total,
        });
    }
    let (na, nb, n) = (problem.n_alpha, problem.n_beta, problem.n_orb());
    let t0 = Instant::now();
    let (e_ccsd, state) = match cfg.ansatz {
        Ansatz::Lucj { n_reps, connectivity } => {
            let cc = problem.ccsd()?;
            let params = lucj_params_from_t2(&cc.amplitudes, n_reps, connectivity);
            (Some(cc.e_total), prepare_lucj_state(n, na, nb, &params)?)
        }
        Ansatz::LcnotUccsd => {
            let (amp, _) = problem.mp2()?;
            let params = qeb_params_from_amplitudes(&amp, n);
            let e = problem.ccsd().ok().map(|c| c.e_total);
            (e, prepare_lcnot_uccsd_state(n, na, nb, &params)?)
        }
    };
    let t_ccsd = t0.elapsed().as_secs_f64();
    let e_fci = if cfg.compute_fci {
        Some(fci_ground_state(&problem.mo, na, nb, &DavidsonOptions::default())?.1.e_total)
    } else {
        None
    };
    Ok(PointData {
        e_rhf: problem.rhf.e_total,
        e_ccsd,
        e_fci,
        n_alpha: na,
        n_beta: nb,
        state,
        t_int: problem.t_int_s,
        t_ccsd,
        problem,
    })
}

fn error_status(e: &Error) -> String {
    format!("error: {}", e.to_string().replace(['\n', '\r'], " "))
}

/// Rows for one geometry, for the requested run indices.
fn solve_point(cfg: &ScanConfig, pt: &GridPoint, runs: &[usize]) -> Vec<ScanRecord> {
    let base = |run: usize| ScanRecord {
        k: pt.k,
        r_angstrom: pt.r,
        theta_degrees: pt.theta,
        run,
        seed: derive_seed(cfg.master_seed, pt.k as u64, run as u64),
        status: "ok".into(),
        ..ScanRecord::default()
    };
    let data = match prepare_point(cfg, pt) {
        Ok(d) => d,
        Err(e) => {
            return runs
                .iter()
                .map(|&run| ScanRecord { status: error_status(&e), ..base(run) })
                .collect()
        }
    };
    let timing = |t: f64| if cfg.record_timings { t } else { 0.0 };
    runs.iter()
        .map(|&run| {
            let mut rec = ScanRecord {
                e_rhf: Some(data.e_rhf),
                e_ccsd: data.e_ccsd,
                e_fci: data.e_fci,
                t_int_s: timing(data.t_int),
                t_ccsd_s: timing(data.t_ccsd),
                ..base(run)
            };
            let t0 = Instant::now();
            let counts = sample_counts(&data.state, cfg.n_shots, rec.seed, &cfg.noise);
            rec.t_sample_s = timing(t0.elapsed().as_secs_f64());
            let t1 = Instant::now();
            let sqd_cfg = SQDConfig { seed: rec.seed, ..cfg.sqd.clone() };
            let out = counts.and_then(|c| run_sqd(&c, &data.problem.mo, data.n_alpha, data.n_beta, &sqd_cfg));
            rec.t_sqd_s = timing(t1.elapsed().as_secs_f64());
            match out {
                Ok(r) => {
                    rec.e_sqd = Some(r.e_sqd);
                    rec.dim_samp = Some(r.dims.samp);
                    rec.dim_postcr = Some(r.dims.postcr);
                    rec.dim_sub = Some(r.dims.sub);
                    rec.dim_sym = Some(r.dims.sym);
                    rec.dim_hilbert = Some(r.dims.hilbert);
                    rec.eta_sym = Some(r.ratios.eta_sym);
                    rec.eta_postcr = Some(r.ratios.eta_postcr);
                    rec.eta_sub = Some(r.ratios.eta_sub);
                }
                Err(e) => rec.status = error_status(&e),
            }
            rec
        })
        .collect()
}

/// Run (or resume) a scan. Rows already present for a (k, run) are kept and
/// not recomputed; new rows are appended in (k, run) order and flushed after
/// every batch of `workers` geometries. Each row depends only on the config,
/// k and run, so the final file does not depend on interruptions.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanSummary> {
    cfg.validate()?;
    let grid = generate_grid(cfg.molecule, cfg.basis, &cfg.grid)?;
    let existing = read_records(&cfg.output)?;
    let done: BTreeSet<(usize, usize)> = existing.iter().map(|r| (r.k, r.run)).collect();
    let keys: BTreeSet<(usize, usize)> = grid
        .iter()
        .flat_map(|p| (0..cfg.runs).map(move |run| (p.k, run)))
        .collect();
    let mut summary = ScanSummary {
        expected: keys.len(),
        skipped: keys.intersection(&done).count(),
        ..ScanSummary::default()
    };
    let todo: Vec<(&GridPoint, Vec<usize>)> = grid
        .iter()
        .map(|p| (p, (0..cfg.runs).filter(|&run| !done.contains(&(p.k, run))).collect::<Vec<_>>()))
        .filter(|(_, runs)| !runs.is_empty())
        .collect();
    let mut writer = RecordWriter::open(&cfg.output)?;
    let mut budget = cfg.max_new_records.unwrap_or(usize::MAX);
    'outer: for chunk in todo.chunks(cfg.workers) {
        let rows = par::map_slice(chunk, |(p, runs)| solve_point(cfg, p, runs));
        for rec in rows.into_iter().flatten() {
            if budget == 0 {
                break 'outer;
            }
            writer.append(&rec)?;
            summary.written += 1;
            budget -= 1;
        }
        writer.flush()?;
    }
    writer.flush()?;
    let after = read_records(&cfg.output)?;
    let present: BTreeSet<(usize, usize)> = after.iter().map(|r| (r.k, r.run)).collect();
    summary.complete = keys.is_subset(&present);
    summary.error_rows = after
        .iter()
        .filter(|r| keys.contains(&(r.k, r.run)) && !r.is_ok())
        .count();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(path: PathBuf) -> ScanConfig {
        ScanConfig {
            grid: GridSpec::Explicit(vec![0.6, 0.7391, 1.5]),
            runs: 2,
            n_shots: 10_000,
            master_seed: 17,
            record_timings: false,
            ..ScanConfig::one_d(ScanMolecule::H2, BasisName::Sto3g, path)
        }
    }

    #[test]
    fn h2_scan_is_exact_and_replayable() {
        let dir = tempfile::tempdir().unwrap();
        let a = small(dir.path().join("a.csv"));
        let s = run_scan(&a).unwrap();
        assert_eq!((s.expected, s.written, s.exit_code()), (6, 6, 0));
        let recs = read_records(&a.output).unwrap();
        for r in &recs {
            assert!((r.e_sqd.unwrap() - r.e_fci.unwrap()).abs() < 1e-9, "{r:?}");
            assert_eq!(r.eta_sub, Some(1.0));
        }
        let b = ScanConfig { output: dir.path().join("b.csv"), ..a.clone() };
        run_scan(&b).unwrap();
        assert_eq!(std::fs::read(&a.output).unwrap(), std::fs::read(&b.output).unwrap());
        // Rerunning a finished scan writes nothing.
        assert_eq!(run_scan(&a).unwrap().written, 0);
    }

    #[test]
    fn interrupted_scan_resumes_to_the_same_file() {
        let dir = tempfile::tempdir().unwrap();
        let full = small(dir.path().join("full.csv"));
        run_scan(&full).unwrap();
        let part = ScanConfig { output: dir.path().join("part.csv"), max_new_records: Some(3), ..full.clone() };
        let s = run_scan(&part).unwrap();
        assert!(!s.complete);
        assert_eq!(s.exit_code(), 2);
        let s = run_scan(&ScanConfig { max_new_records: None, ..part.clone() }).unwrap();
        assert_eq!((s.skipped, s.written), (3, 3));
        assert_eq!(std::fs::read(&full.output).unwrap(), std::fs::read(&part.output).unwrap());
    }

    #[test]
    fn failures_become_error_rows() {
        let dir = tempfile::tempdir().unwrap();
        // One uniformly scrambled shot; with this seed it misses the (2, 2) sector.
        let cfg = ScanConfig {
            grid: GridSpec::Explicit(vec![1.5]),
            runs: 1,
            noise: NoiseModel::readout(0.5),
            n_shots: 1,
            ..ScanConfig::one_d(ScanMolecule::LiH, BasisName::Sto3g, dir.path().join("e.csv"))
        };
        let s = run_scan(&cfg).unwrap();
        assert_eq!((s.error_rows, s.exit_code()), (1, 2));
        let recs = read_records(&cfg.output).unwrap();
        assert!(recs[0].status.starts_with("error: no sampled configuration"), "{}", recs[0].status);
        assert!(recs[0].e_fci.is_some() && recs[0].e_sqd.is_none());
        assert!(run_scan(&ScanConfig { runs: 0, ..cfg }).is_err());
    }
}
