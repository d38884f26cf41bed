//! FCIDUMP reader and writer (Knowles–Handy text layout, 1-indexed,
//! chemist notation).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::eri::PackedEri;
use crate::scf::MOIntegrals;
use crate::{Error, Result};

/// Header metadata of an FCIDUMP file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub orbsym: Vec<i64>,
    pub isym: i64,
}

impl FcidumpHeader {
    pub fn new(norb: usize, nelec: usize, ms2: i64) -> Self {
        Self {
            norb,
            nelec,
            ms2,
            orbsym: vec![1; norb],
            isym: 1,
        }
    }
}

/// Serialize integrals; entries with |value| < `1e-300` are skipped.
pub fn write_string(mo: &MOIntegrals, header: &FcidumpHeader) -> Result<String> {
    if header.norb != mo.n_orb || header.orbsym.len() != mo.n_orb {
        return Err(Error::Fcidump("header NORB does not match integrals".into()));
    }
    let n = mo.n_orb;
    let mut s = String::new();
    let _ = writeln!(
        s,
        " &FCI NORB={},NELEC={},MS2={},",
        header.norb, header.nelec, header.ms2
    );
    let syms: Vec<String> = header.orbsym.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(s, "  ORBSYM={},", syms.join(","));
    let _ = writeln!(s, "  ISYM={},", header.isym);
    let _ = writeln!(s, " &END");
    let tiny = 1e-300;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                        continue;
                    }
                    let v = mo.h2.get(i, j, k, l);
                    if v.abs() > tiny {
                        let _ = writeln!(s, "{:.17e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = mo.h1[(i, j)];
            if v.abs() > tiny {
                let _ = writeln!(s, "{:.17e} {} {} 0 0", v, i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(s, "{:.17e} 0 0 0 0", mo.e_core);
    Ok(s)
}

fn parse_header(text: &str) -> Result<FcidumpHeader> {
    let cleaned = text
        .replace("&FCI", " ")
        .replace("&fci", " ")
        .replace("&END", " ")
        .replace("&end", " ")
        .replace(',', " ")
        .replace('=', "= ");
    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i64;
    let mut orbsym = Vec::new();
    let mut isym = 1i64;
    let mut key = String::new();
    for tok in cleaned.split_whitespace() {
        if let Some(k) = tok.strip_suffix('=') {
            key = k.to_ascii_uppercase();
            continue;
        }
        let val: i64 = tok
            .parse()
            .map_err(|_| Error::Fcidump(format!("bad header token `{tok}`")))?;
        match key.as_str() {
            "NORB" => norb = Some(val),
            "NELEC" => nelec = Some(val),
            "MS2" => ms2 = val,
            "ORBSYM" => orbsym.push(val),
            "ISYM" => isym = val,
            "" => return Err(Error::Fcidump(format!("value `{tok}` without key"))),
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| Error::Fcidump("missing NORB".into()))?;
    let nelec = nelec.ok_or_else(|| Error::Fcidump("missing NELEC".into()))?;
    if norb <= 0 || nelec < 0 {
        return Err(Error::Fcidump("invalid NORB/NELEC".into()));
    }
    let norb = norb as usize;
    if orbsym.is_empty() {
        orbsym = vec![1; norb];
    }
    if orbsym.len() != norb {
        return Err(Error::Fcidump("ORBSYM length differs from NORB".into()));
    }
    Ok(FcidumpHeader {
        norb,
        nelec: nelec as usize,
        ms2,
        orbsym,
        isym,
    })
}

/// Parse FCIDUMP text.
pub fn read_string(text: &str) -> Result<(MOIntegrals, FcidumpHeader)> {
    let upper = text.to_ascii_uppercase();
    let end = upper
        .find("&END")
        .map(|p| (p, 4))
        .or_else(|| upper.find("\n/").map(|p| (p, 2)))
        .ok_or_else(|| Error::Fcidump("missing &END".into()))?;
    let header = parse_header(&text[..end.0])?;
    let n = header.norb;
    let mut h1 = DMatrix::<f64>::zeros(n, n);
    let mut h1_seen = DMatrix::from_element(n, n, false);
    let mut h2 = PackedEri::zeros(n);
    let mut h2_seen = vec![false; h2.data.len()];
    let mut e_core = 0.0;
    for line in text[end.0 + end.1..].lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 5 {
            return Err(Error::Fcidump(format!("malformed record `{line}`")));
        }
        let v: f64 = f[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| Error::Fcidump(format!("bad value `{}`", f[0])))?;
        let mut idx = [0usize; 4];
        for k in 0..4 {
            let x: i64 = f[k + 1]
                .parse()
                .map_err(|_| Error::Fcidump(format!("bad index `{}`", f[k + 1])))?;
            if x < 0 || x as usize > n {
                return Err(Error::Fcidump(format!("index {x} out of range for NORB={n}")));
            }
            idx[k] = x as usize;
        }
        match idx {
            [0, 0, 0, 0] => e_core = v,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (i, j) = (i - 1, j - 1);
                if h1_seen[(i, j)] && (h1[(i, j)] - v).abs() > 1e-12 {
                    return Err(Error::Fcidump(format!("non-symmetric one-body data at ({i},{j})")));
                }
                h1[(i, j)] = v;
                h1[(j, i)] = v;
                h1_seen[(i, j)] = true;
                h1_seen[(j, i)] = true;
            }
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let x = super::eri::quartet_index(i - 1, j - 1, k - 1, l - 1);
                if h2_seen[x] && (h2.data[x] - v).abs() > 1e-12 {
                    return Err(Error::Fcidump(format!(
                        "non-symmetric two-body data at ({i},{j},{k},{l})"
                    )));
                }
                h2.data[x] = v;
                h2_seen[x] = true;
            }
            _ => return Err(Error::Fcidump(format!("unsupported index pattern `{line}`"))),
        }
    }
    Ok((
        MOIntegrals {
            n_orb: n,
            h1,
            h2,
            e_core,
        },
        header,
    ))
}

pub fn write(path: &Path, mo: &MOIntegrals, header: &FcidumpHeader) -> Result<()> {
    std::fs::write(path, write_string(mo, header)?)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(MOIntegrals, FcidumpHeader)> {
    read_string(&std::fs::read_to_string(path)?)
}
