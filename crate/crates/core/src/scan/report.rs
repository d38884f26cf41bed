//! Plot-ready tables derived from a scan CSV. Nothing is rendered.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::record::{fmt_f64, read_records, ScanRecord};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportMode {
    /// ΔE = E − E_FCI per row.
    Delta,
    /// Subspace ratios per row.
    Eta,
    /// r × θ matrices of energies, ΔE and η_sub.
    Grid,
    /// Geometries ranked by FCI energy with the matching SQD energy.
    Rank,
    All,
}

impl FromStr for ReportMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delta" | "de" => Ok(ReportMode::Delta),
            "eta" => Ok(ReportMode::Eta),
            "grid" | "2d" => Ok(ReportMode::Grid),
            "rank" => Ok(ReportMode::Rank),
            "all" => Ok(ReportMode::All),
            other => Err(Error::Invalid(format!("unknown report mode `{other}`"))),
        }
    }
}

impl fmt::Display for ReportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportMode::Delta => "delta",
            ReportMode::Eta => "eta",
            ReportMode::Grid => "grid",
            ReportMode::Rank => "rank",
            ReportMode::All => "all",
        })
    }
}

fn optf(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

/// Lowest-energy successful run per geometry index.
fn best_per_point(recs: &[ScanRecord]) -> BTreeMap<usize, &ScanRecord> {
    let mut best: BTreeMap<usize, &ScanRecord> = BTreeMap::new();
    for r in recs.iter().filter(|r| r.is_ok() && r.e_sqd.is_some()) {
        let keep = match best.get(&r.k) {
            Some(b) => r.e_sqd < b.e_sqd,
            None => true,
        };
        if keep {
            best.insert(r.k, r);
        }
    }
    best
}

/// Grid node (k, r, θ, E) with the lowest best-run SQD energy, or the
/// lowest FCI energy when `use_fci` is set.
pub fn grid_minimum(recs: &[ScanRecord], use_fci: bool) -> Option<(usize, f64, Option<f64>, f64)> {
    best_per_point(recs)
        .into_values()
        .filter_map(|r| {
            let e = if use_fci { r.e_fci } else { r.e_sqd }?;
            Some((r.k, r.r_angstrom, r.theta_degrees, e))
        })
        .min_by(|a, b| a.3.total_cmp(&b.3))
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn row_prefix(r: &ScanRecord) -> Vec<String> {
    vec![r.k.to_string(), fmt_f64(r.r_angstrom), optf(r.theta_degrees), r.run.to_string()]
}

fn delta_table(recs: &[ScanRecord], path: &Path) -> Result<()> {
    let header = [
        "k",
        "r_angstrom",
        "theta_degrees",
        "run",
        "e_fci",
        "e_sqd",
        "e_ccsd",
        "de_sqd_fci",
        "de_ccsd_fci",
    ];
    let rows = recs.iter().filter(|r| r.is_ok()).map(|r| {
        let mut v = row_prefix(r);
        v.extend([
            optf(r.e_fci),
            optf(r.e_sqd),
            optf(r.e_ccsd),
            optf(diff(r.e_sqd, r.e_fci)),
            optf(diff(r.e_ccsd, r.e_fci)),
        ]);
        v
    });
    write_table(path, &header, rows)
}

fn eta_table(recs: &[ScanRecord], path: &Path) -> Result<()> {
    let header = [
        "k",
        "r_angstrom",
        "theta_degrees",
        "run",
        "dim_sub",
        "dim_sym",
        "eta_sym",
        "eta_postcr",
        "eta_sub",
    ];
    let rows = recs.iter().filter(|r| r.is_ok()).map(|r| {
        let mut v = row_prefix(r);
        v.extend([
            r.dim_sub.map(|x| x.to_string()).unwrap_or_default(),
            r.dim_sym.map(|x| x.to_string()).unwrap_or_default(),
            optf(r.eta_sym),
            optf(r.eta_postcr),
            optf(r.eta_sub),
        ]);
        v
    });
    write_table(path, &header, rows)
}

fn rank_table(recs: &[ScanRecord], path: &Path) -> Result<()> {
    let mut pts: Vec<&ScanRecord> = best_per_point(recs).into_values().filter(|r| r.e_fci.is_some()).collect();
    pts.sort_by(|a, b| a.e_fci.unwrap().total_cmp(&b.e_fci.unwrap()).then(a.k.cmp(&b.k)));
    let header = ["rank", "k", "r_angstrom", "theta_degrees", "e_fci", "e_sqd", "de_sqd_fci"];
    let rows = pts.into_iter().enumerate().map(|(i, r)| {
        vec![
            i.to_string(),
            r.k.to_string(),
            fmt_f64(r.r_angstrom),
            optf(r.theta_degrees),
            optf(r.e_fci),
            optf(r.e_sqd),
            optf(diff(r.e_sqd, r.e_fci)),
        ]
    });
    write_table(path, &header, rows)
}

/// Matrices with r down the rows and θ across the columns.
fn grid_tables(recs: &[ScanRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let best = best_per_point(recs);
    let key = |x: f64| fmt_f64(x);
    let mut rs: Vec<f64> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    let mut cells: BTreeMap<(String, String), &ScanRecord> = BTreeMap::new();
    for r in best.values() {
        let Some(t) = r.theta_degrees else { continue };
        if !rs.iter().any(|&x| key(x) == key(r.r_angstrom)) {
            rs.push(r.r_angstrom);
        }
        if !ts.iter().any(|&x| key(x) == key(t)) {
            ts.push(t);
        }
        cells.insert((key(r.r_angstrom), key(t)), r);
    }
    rs.sort_by(f64::total_cmp);
    ts.sort_by(f64::total_cmp);
    let corner = "r_angstrom\\theta_degrees".to_string();
    let quantities: [(&str, fn(&ScanRecord) -> Option<f64>); 4] = [
        ("e_sqd", |r| r.e_sqd),
        ("e_fci", |r| r.e_fci),
        ("de_sqd_fci", |r| diff(r.e_sqd, r.e_fci)),
        ("eta_sub", |r| r.eta_sub),
    ];
    let mut out = Vec::new();
    for (name, get) in quantities {
        let path = dir.join(format!("grid_{name}.csv"));
        let mut header = vec![corner.clone()];
        header.extend(ts.iter().map(|t| format!("{t:.6}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = rs.iter().map(|&r| {
            let mut v = vec![format!("{r:.6}")];
            v.extend(ts.iter().map(|&t| optf(cells.get(&(key(r), key(t))).and_then(|c| get(c)))));
            v
        });
        write_table(&path, &header, rows)?;
        out.push(path);
    }
    Ok(out)
}

/// Write the tables for `mode` into `out_dir`; returns the files written.
pub fn report(csv: &Path, mode: ReportMode, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let recs = read_records(csv)?;
    std::fs::create_dir_all(out_dir)?;
    let mut out = Vec::new();
    let all = mode == ReportMode::All;
    if all || mode == ReportMode::Delta {
        let p = out_dir.join("delta_e.csv");
        delta_table(&recs, &p)?;
        out.push(p);
    }
    if all || mode == ReportMode::Eta {
        let p = out_dir.join("eta.csv");
        eta_table(&recs, &p)?;
        out.push(p);
    }
    if all || mode == ReportMode::Rank {
        let p = out_dir.join("rank.csv");
        rank_table(&recs, &p)?;
        out.push(p);
    }
    if all || mode == ReportMode::Grid {
        out.extend(grid_tables(&recs, out_dir)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::record::RecordWriter;

    fn rec(k: usize, r: f64, t: Option<f64>, run: usize, e_sqd: f64, e_fci: f64) -> ScanRecord {
        ScanRecord {
            k,
            r_angstrom: r,
            theta_degrees: t,
            run,
            e_sqd: Some(e_sqd),
            e_fci: Some(e_fci),
            eta_sub: Some(1.0),
            status: "ok".into(),
            ..ScanRecord::default()
        }
    }

    fn write(path: &Path, recs: &[ScanRecord]) {
        let mut w = RecordWriter::open(path).unwrap();
        for r in recs {
            w.append(r).unwrap();
        }
        w.flush().unwrap();
    }

    #[test]
    fn empty_csv_gives_header_only_tables() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("s.csv");
        write(&csv, &[]);
        let files = report(&csv, ReportMode::All, dir.path()).unwrap();
        assert_eq!(files.len(), 7);
        for f in files {
            let text = std::fs::read_to_string(f).unwrap();
            assert_eq!(text.lines().count(), 1);
        }
    }

    #[test]
    fn grid_matrices_and_minimum() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("s.csv");
        let recs = vec![
            rec(0, 0.9, Some(90.0), 0, -75.0, -75.1),
            rec(1, 0.9, Some(100.0), 0, -75.2, -75.3),
            rec(2, 1.0, Some(90.0), 0, -75.05, -75.06),
            rec(2, 1.0, Some(90.0), 1, -75.055, -75.06),
        ];
        write(&csv, &recs);
        let files = report(&csv, ReportMode::Grid, dir.path()).unwrap();
        let e = std::fs::read_to_string(&files[0]).unwrap();
        let lines: Vec<&str> = e.lines().collect();
        assert_eq!(lines[0], "r_angstrom\\theta_degrees,90.000000,100.000000");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1.000000,-7.50550000000e1,"));
        assert!(lines[2].ends_with(','));
        let m = grid_minimum(&recs, false).unwrap();
        assert_eq!((m.0, m.2), (1, Some(100.0)));
        let delta = report(&csv, ReportMode::Delta, dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(&delta[0]).unwrap().lines().count(), 5);
    }
}
