//! `sqdlab` command-line driver.
//!
//! Exit codes: 0 success, 2 partial (a scan finished with error rows or was
//! cut short), 1 fatal.

mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sqdlab::detspace::{fci_ground_state, DavidsonOptions};
use sqdlab::dmet::{run_dmet, DmetConfig, SolverConfig, SolverKind};
use sqdlab::molint::fcidump::{self, FcidumpHeader};
use sqdlab::molint::{parse_geometry, BasisName, LengthUnit, Molecule};
use sqdlab::pipeline::Problem;
use sqdlab::qsim::{
    lucj_params_from_t2, prepare_lcnot_uccsd_state, prepare_lucj_state, qeb_params_from_amplitudes, sample_counts,
    Counts, NoiseModel,
};
use sqdlab::scan::{report, run_scan, Ansatz, Axis, GridSpec, ReportMode, ScanConfig, ScanMolecule};
use sqdlab::scf::{ccsd_solve, mp2_amplitudes, CcsdOptions, MOIntegrals};
use sqdlab::seeds::derive_seed;
use sqdlab::sqd::{run_sqd, SQDConfig, SamplesPerBatch};
use sqdlab::systems;

use settings::{Overrides, Settings};

#[derive(Parser, Debug)]
#[command(name = "sqdlab", version, about = "Sample-based quantum diagonalization workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// RHF canonical-orbital integrals written as FCIDUMP.
    Integrals,
    /// RHF, MP2 and CCSD energies.
    Scf,
    /// Exact diagonalization in the full symmetry sector.
    Fci,
    /// Sample an ansatz (or read counts) and run SQD.
    Sqd,
    /// Bond-length scan with a resumable CSV.
    #[command(name = "scan-1d")]
    Scan1d,
    /// H2O (r, theta) surface scan with a resumable CSV.
    #[command(name = "scan-2d")]
    Scan2d,
    /// One-shot DMET with a chosen impurity solver.
    Dmet,
    /// Plot-ready tables from a scan CSV.
    Report,
}

type Res<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn show(key: &str, value: impl std::fmt::Display) {
    println!("{key} = {value}");
}

fn molecule(s: &Settings) -> Res<Molecule> {
    if let Some(g) = s.get("geometry") {
        let unit = match s.get("unit").unwrap_or("angstrom").to_ascii_lowercase().as_str() {
            "angstrom" | "a" => LengthUnit::Angstrom,
            "bohr" | "au" => LengthUnit::Bohr,
            other => return Err(format!("unknown unit `{other}`")),
        };
        return parse_geometry(g, unit, s.parse_or("charge", 0i32)?).map_err(err);
    }
    let name = s.require("molecule")?;
    Ok(systems::find(name).map_err(err)?.molecule())
}

fn basis(s: &Settings) -> Res<BasisName> {
    BasisName::parse(s.get("basis").unwrap_or("sto-3g")).map_err(err)
}

fn problem(s: &Settings) -> Res<Problem> {
    Problem::new(molecule(s)?, basis(s)?).map_err(err)
}

fn noise(s: &Settings) -> Res<NoiseModel> {
    let p_ro: f64 = s.parse_or("p_ro", 0.0)?;
    let p2: f64 = s.parse_or("p2", 0.0)?;
    let n = NoiseModel {
        enabled: p_ro > 0.0 || p2 > 0.0,
        readout_flip: p_ro,
        two_qubit_depolarizing: p2,
        trajectories: s.parse_or("trajectories", 100usize)?,
    };
    n.validate().map_err(err)?;
    Ok(n)
}

fn sqd_config(s: &Settings) -> Res<SQDConfig> {
    let d = SQDConfig::default();
    Ok(SQDConfig {
        n_iterations: s.parse_or("iterations", d.n_iterations)?,
        samples_per_batch: s.parse_or("samples_per_batch", d.samples_per_batch)?,
        n_batches: s.parse_or("batches", d.n_batches)?,
        seed: s.parse_or("seed", 0u64)?,
        ..d
    })
}

fn ansatz(s: &Settings) -> Res<Ansatz> {
    let a: Ansatz = s.parse_or("ansatz", Ansatz::default())?;
    Ok(match a {
        Ansatz::Lucj { connectivity, .. } => Ansatz::Lucj {
            n_reps: s.parse_or("lucj_reps", 1usize)?,
            connectivity,
        },
        other => other,
    })
}

/// Integrals and electron counts from an FCIDUMP or a molecule.
fn hamiltonian(s: &Settings) -> Res<(MOIntegrals, usize, usize, Vec<f64>)> {
    if let Some(path) = s.get("fcidump") {
        let (mo, h) = fcidump::read(Path::new(path)).map_err(err)?;
        let ms2 = h.ms2.unsigned_abs() as usize;
        if h.nelec < ms2 || (h.nelec - ms2) % 2 != 0 {
            return Err(format!("FCIDUMP NELEC {} and MS2 {} are inconsistent", h.nelec, h.ms2));
        }
        let nb = (h.nelec - ms2) / 2;
        let na = nb + ms2;
        let eps = if na == nb {
            let f = mo.fock(na);
            (0..mo.n_orb).map(|p| f[(p, p)]).collect()
        } else {
            Vec::new()
        };
        return Ok((mo, na, nb, eps));
    }
    let p = problem(s)?;
    let eps = p.eps().to_vec();
    Ok((p.mo, p.n_alpha, p.n_beta, eps))
}

fn cmd_integrals(s: &Settings) -> Res<i32> {
    let p = problem(s)?;
    let header = FcidumpHeader::new(p.n_orb(), p.n_alpha + p.n_beta, 0);
    match s.get("output") {
        Some(out) => {
            fcidump::write(Path::new(out), &p.mo, &header).map_err(err)?;
            show("fcidump", out);
            show("n_orb", p.n_orb());
            show("e_rhf", format!("{:.12}", p.rhf.e_total));
        }
        None => print!("{}", fcidump::write_string(&p.mo, &header).map_err(err)?),
    }
    Ok(0)
}

fn cmd_scf(s: &Settings) -> Res<i32> {
    let p = problem(s)?;
    show("n_ao", p.ao.n_ao);
    show("n_electrons", p.molecule.n_electrons());
    show("e_nuc", format!("{:.12}", p.ao.e_nuc));
    show("rhf_converged", p.rhf.converged);
    show("rhf_iterations", p.rhf.n_iterations);
    show("e_rhf", format!("{:.12}", p.rhf.e_total));
    let (_, e2) = p.mp2().map_err(err)?;
    show("e_mp2", format!("{:.12}", p.rhf.e_total + e2));
    if s.parse_or("ccsd", true)? {
        let cc = p.ccsd().map_err(err)?;
        show("ccsd_iterations", cc.n_iterations);
        show("e_ccsd", format!("{:.12}", cc.e_total));
    }
    Ok(0)
}

fn cmd_fci(s: &Settings) -> Res<i32> {
    let (mo, na, nb, _) = hamiltonian(s)?;
    let (space, r) = fci_ground_state(&mo, na, nb, &DavidsonOptions::default()).map_err(err)?;
    show("n_orb", mo.n_orb);
    show("dim_sym", space.len());
    show("davidson_cycles", r.n_davidson_cycles);
    show("s2", format!("{:.6}", r.s2));
    show("e_fci", format!("{:.12}", r.e_total));
    Ok(0)
}

fn cmd_sqd(s: &Settings) -> Res<i32> {
    let (mo, na, nb, eps) = hamiltonian(s)?;
    let seed: u64 = s.parse_or("seed", 0)?;
    let counts = match s.get("counts") {
        Some(path) => Counts::read(Path::new(path)).map_err(err)?,
        None => {
            if na != nb {
                return Err("sampling needs a closed-shell reference; pass --counts".into());
            }
            let n = mo.n_orb;
            let state = match ansatz(s)? {
                Ansatz::Lucj { n_reps, connectivity } => {
                    let cc = ccsd_solve(&mo, &eps, na, &CcsdOptions::default()).map_err(err)?;
                    show("e_ccsd", format!("{:.12}", cc.e_total));
                    prepare_lucj_state(n, na, nb, &lucj_params_from_t2(&cc.amplitudes, n_reps, connectivity))
                }
                Ansatz::LcnotUccsd => {
                    let (amp, _) = mp2_amplitudes(&mo, &eps, na).map_err(err)?;
                    prepare_lcnot_uccsd_state(n, na, nb, &qeb_params_from_amplitudes(&amp, n))
                }
            }
            .map_err(err)?;
            let shots = s.parse_or("n_shots", 10_000u64)?;
            let c = sample_counts(&state, shots, derive_seed(seed, 0, 0), &noise(s)?).map_err(err)?;
            if let Some(out) = s.get("counts_out") {
                c.write(Path::new(out)).map_err(err)?;
            }
            c
        }
    };
    let r = run_sqd(&counts, &mo, na, nb, &sqd_config(s)?).map_err(err)?;
    show("e_sqd", format!("{:.12}", r.e_sqd));
    show("best_iteration", r.best_iteration);
    show("dim_samp", r.dims.samp);
    show("dim_postcr", r.dims.postcr);
    show("dim_sub", r.dims.sub);
    show("dim_sym", r.dims.sym);
    show("eta_sym", format!("{:.6}", r.ratios.eta_sym));
    show("eta_postcr", format!("{:.6}", r.ratios.eta_postcr));
    show("eta_sub", format!("{:.6}", r.ratios.eta_sub));
    show("raw_sector_fraction", format!("{:.6}", r.raw_sector_fraction));
    if s.parse_or("fci", false)? {
        let (_, f) = fci_ground_state(&mo, na, nb, &DavidsonOptions::default()).map_err(err)?;
        show("e_fci", format!("{:.12}", f.e_total));
        show("de_sqd_fci", format!("{:.3e}", r.e_sqd - f.e_total));
    }
    Ok(0)
}

fn scan_common(s: &Settings, mut cfg: ScanConfig) -> Res<ScanConfig> {
    cfg.n_shots = s.parse_or("n_shots", cfg.n_shots)?;
    cfg.ansatz = ansatz(s)?;
    cfg.sqd = sqd_config(s)?;
    cfg.noise = noise(s)?;
    cfg.master_seed = s.parse_or("seed", 0u64)?;
    cfg.compute_fci = s.parse_or("fci", true)?;
    cfg.record_timings = s.parse_or("timings", true)?;
    cfg.inter_run_sleep_s = s.parse_or("sleep", 0.0)?;
    cfg.workers = s.parse_or("workers", cfg.workers)?;
    cfg.max_new_records = s.parse_opt("max_records")?;
    cfg.runs = s.parse_or("runs", cfg.runs)?;
    Ok(cfg)
}

fn finish_scan(cfg: &ScanConfig) -> Res<i32> {
    let sum = run_scan(cfg).map_err(err)?;
    show("output", cfg.output.display());
    show("expected", sum.expected);
    show("written", sum.written);
    show("skipped", sum.skipped);
    show("error_rows", sum.error_rows);
    show("complete", sum.complete);
    Ok(sum.exit_code())
}

fn cmd_scan_1d(s: &Settings) -> Res<i32> {
    let mol: ScanMolecule = s.require("molecule")?.parse().map_err(err)?;
    let mut cfg = ScanConfig::one_d(mol, basis(s)?, PathBuf::from(s.require("output")?));
    if let Some(list) = s.get("r_list") {
        let rs = list
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("r_list `{x}`: {e}")))
            .collect::<Res<Vec<_>>>()?;
        cfg.grid = GridSpec::Explicit(rs);
    }
    finish_scan(&scan_common(s, cfg)?)
}

fn cmd_scan_2d(s: &Settings) -> Res<i32> {
    let mut cfg = ScanConfig::two_d(PathBuf::from(s.require("output")?));
    if let Some(m) = s.get("molecule") {
        if m.parse::<ScanMolecule>().map_err(err)? != ScanMolecule::H2O {
            return Err("2D scans are defined for H2O only".into());
        }
    }
    cfg.basis = basis(s)?;
    cfg.grid = GridSpec::Grid2D {
        r: Axis::new(s.parse_or("r_min", 0.85)?, s.parse_or("r_max", 1.20)?, s.parse_or("n_r", 32)?),
        theta: Axis::new(
            s.parse_or("theta_min", 85.0)?,
            s.parse_or("theta_max", 115.0)?,
            s.parse_or("n_theta", 32)?,
        ),
        stride: s.parse_or("stride", 1)?,
    };
    finish_scan(&scan_common(s, cfg)?)
}

fn cmd_dmet(s: &Settings) -> Res<i32> {
    let p = problem(s)?;
    let d = DmetConfig::default();
    let window = match s.get("window") {
        None => d.solver.window,
        Some(w) if w.eq_ignore_ascii_case("none") => None,
        Some(w) => {
            let (a, b) = w.split_once(',').ok_or_else(|| format!("window `{w}`: expected `occ,vir`"))?;
            Some((
                a.trim().parse().map_err(|e| format!("window `{w}`: {e}"))?,
                b.trim().parse().map_err(|e| format!("window `{w}`: {e}"))?,
            ))
        }
    };
    let kind: SolverKind = s.parse_or("solver", SolverKind::Casci)?;
    let mut sqd = d.solver.sqd.clone();
    if let Some(eps) = s.parse_opt::<SamplesPerBatch>("samples_per_batch")? {
        sqd.samples_per_batch = eps;
    }
    sqd.n_iterations = s.parse_or("iterations", sqd.n_iterations)?;
    let cfg = DmetConfig {
        localization: s.parse_or("localization", d.localization)?,
        fragments: s.parse_or("fragments", d.fragments.clone())?,
        solver: SolverConfig {
            kind,
            window,
            n_shots: s.parse_or("n_shots", d.solver.n_shots)?,
            lucj_reps: s.parse_or("lucj_reps", d.solver.lucj_reps)?,
            noise: noise(s)?,
            sqd,
            seed: s.parse_or("seed", 0u64)?,
        },
        ..d
    };
    let r = run_dmet(&p, &cfg).map_err(err)?;
    show("solver", r.solver);
    show("e_rhf", format!("{:.12}", p.rhf.e_total));
    show("e_dmet", format!("{:.12}", r.e_total));
    show("mu", format!("{:.10}", r.mu));
    show("converged", r.converged);
    show("iterations", r.n_iterations);
    show("n_fragments", r.fragment_energies.len());
    for (k, e) in r.fragment_energies.iter().enumerate() {
        let (no, ne) = r.active_spaces[k];
        show(&format!("fragment_{k}"), format!("{e:.12} (bath {}, active {no}o/{ne}e)", r.n_bath[k]));
    }
    if let Some(t) = s.get("trace") {
        r.write_trace_file(Path::new(t)).map_err(err)?;
        show("trace", t);
    }
    Ok(0)
}

fn cmd_report(s: &Settings) -> Res<i32> {
    let input = s.get("input").or_else(|| s.get("output")).ok_or("missing `input` scan CSV")?;
    let mode: ReportMode = s.parse_or("mode", ReportMode::All)?;
    let out_dir = PathBuf::from(s.get("out_dir").unwrap_or("."));
    for f in report(Path::new(input), mode, &out_dir).map_err(err)? {
        println!("{}", f.display());
    }
    Ok(0)
}

fn run(cli: &Cli) -> Res<i32> {
    let s = Settings::load(&cli.opts)?;
    match cli.command {
        Command::Integrals => cmd_integrals(&s),
        Command::Scf => cmd_scf(&s),
        Command::Fci => cmd_fci(&s),
        Command::Sqd => cmd_sqd(&s),
        Command::Scan1d => cmd_scan_1d(&s),
        Command::Scan2d => cmd_scan_2d(&s),
        Command::Dmet => cmd_dmet(&s),
        Command::Report => cmd_report(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("sqdlab: {e}");
            ExitCode::from(1)
        }
    }
}
