//! The scan CSV: a versioned comment line, a fixed header, then one row per
//! (k, run). Floats carry 12 significant digits; missing values are empty.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_LINE: &str = "# sqdlab-scan v1";

pub const COLUMNS: [&str; 22] = [
    "k",
    "r_angstrom",
    "theta_degrees",
    "run",
    "e_rhf",
    "e_ccsd",
    "e_fci",
    "e_sqd",
    "dim_samp",
    "dim_postcr",
    "dim_sub",
    "dim_sym",
    "dim_hilbert",
    "eta_sym",
    "eta_postcr",
    "eta_sub",
    "t_int_s",
    "t_ccsd_s",
    "t_sample_s",
    "t_sqd_s",
    "seed",
    "status",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub k: usize,
    pub r_angstrom: f64,
    pub theta_degrees: Option<f64>,
    pub run: usize,
    pub e_rhf: Option<f64>,
    pub e_ccsd: Option<f64>,
    pub e_fci: Option<f64>,
    pub e_sqd: Option<f64>,
    pub dim_samp: Option<u64>,
    pub dim_postcr: Option<u64>,
    pub dim_sub: Option<u64>,
    pub dim_sym: Option<u128>,
    pub dim_hilbert: Option<u128>,
    pub eta_sym: Option<f64>,
    pub eta_postcr: Option<f64>,
    pub eta_sub: Option<f64>,
    pub t_int_s: f64,
    pub t_ccsd_s: f64,
    pub t_sample_s: f64,
    pub t_sqd_s: f64,
    pub seed: u64,
    /// `ok` or `error: <message>`.
    pub status: String,
}

/// 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn optf(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl ScanRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            fmt_f64(self.r_angstrom),
            optf(self.theta_degrees),
            self.run.to_string(),
            optf(self.e_rhf),
            optf(self.e_ccsd),
            optf(self.e_fci),
            optf(self.e_sqd),
            opt(self.dim_samp),
            opt(self.dim_postcr),
            opt(self.dim_sub),
            opt(self.dim_sym),
            opt(self.dim_hilbert),
            optf(self.eta_sym),
            optf(self.eta_postcr),
            optf(self.eta_sub),
            fmt_f64(self.t_int_s),
            fmt_f64(self.t_ccsd_s),
            fmt_f64(self.t_sample_s),
            fmt_f64(self.t_sqd_s),
            self.seed.to_string(),
            self.status.clone(),
        ]
    }
}

/// Appends records to a scan file, writing the schema line and header when
/// the file is new or empty.
pub struct RecordWriter {
    inner: csv::Writer<File>,
}

impl RecordWriter {
    pub fn open(path: &Path) -> Result<Self> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        if !fresh {
            check_schema(path)?;
            drop_partial_line(path)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(file, "{SCHEMA_LINE}")?;
        }
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            inner.write_record(COLUMNS)?;
            inner.flush()?;
        }
        Ok(Self { inner })
    }

    pub fn append(&mut self, rec: &ScanRecord) -> Result<()> {
        self.inner.write_record(rec.fields())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        self.inner.get_ref().sync_data()?;
        Ok(())
    }
}

/// Cut an unterminated last line left by an interrupted write.
fn drop_partial_line(path: &Path) -> Result<()> {
    let bytes = std::fs::read(path)?;
    if bytes.last() != Some(&b'\n') {
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    }
    Ok(())
}

fn check_schema(path: &Path) -> Result<()> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(Error::Invalid(format!(
            "{} does not start with `{SCHEMA_LINE}`",
            path.display()
        )));
    }
    Ok(())
}

/// Read every record; a missing or empty file yields none. A truncated last
/// line (from an interrupted write) is dropped.
pub fn read_records(path: &Path) -> Result<Vec<ScanRecord>> {
    if std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true) {
        return Ok(Vec::new());
    }
    check_schema(path)?;
    let text = std::fs::read_to_string(path)?;
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(complete.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if !header.is_empty() && header != COLUMNS {
        return Err(Error::Invalid("scan CSV header does not match the v1 schema".into()));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_missing_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let a = ScanRecord {
            k: 3,
            r_angstrom: 0.7391,
            run: 1,
            e_fci: Some(-1.13728383),
            dim_sym: Some(4),
            seed: 99,
            status: "ok".into(),
            ..ScanRecord::default()
        };
        let b = ScanRecord {
            k: 4,
            r_angstrom: 1.0,
            theta_degrees: Some(96.61290322580645),
            status: "error: rhf, did not converge".into(),
            ..ScanRecord::default()
        };
        {
            let mut w = RecordWriter::open(&path).unwrap();
            w.append(&a).unwrap();
            w.flush().unwrap();
        }
        let mut w = RecordWriter::open(&path).unwrap();
        w.append(&b).unwrap();
        w.flush().unwrap();
        let got = read_records(&path).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].e_fci, Some(-1.13728383));
        assert_eq!(got[0].e_sqd, None);
        assert_eq!(got[1].status, b.status);
        assert!((got[1].theta_degrees.unwrap() - 96.6129032258).abs() < 1e-9);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), SCHEMA_LINE);
        assert_eq!(text.lines().filter(|l| l.starts_with("k,")).count(), 1);
    }

    #[test]
    fn truncated_tail_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let mut w = RecordWriter::open(&path).unwrap();
        w.append(&ScanRecord { status: "ok".into(), ..ScanRecord::default() }).unwrap();
        w.flush().unwrap();
        drop(w);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "1,1.0,,0,-1.1").unwrap();
        assert_eq!(read_records(&path).unwrap().len(), 1);
        let mut w = RecordWriter::open(&path).unwrap();
        w.append(&ScanRecord { k: 2, status: "ok".into(), ..ScanRecord::default() }).unwrap();
        w.flush().unwrap();
        let got = read_records(&path).unwrap();
        assert_eq!(got.iter().map(|r| r.k).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn foreign_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(RecordWriter::open(&path).is_err());
        assert!(read_records(&path).is_err());
    }
}
