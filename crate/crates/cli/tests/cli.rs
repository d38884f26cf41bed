use std::path::Path;
use std::process::{Command, Output};

fn sqdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqdlab")).args(args).output().unwrap()
}

fn value(out: &Output, key: &str) -> String {
    let text = String::from_utf8_lossy(&out.stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .to_string()
}

#[test]
fn scf_and_fci_print_energies() {
    let out = sqdlab(&["scf", "--molecule", "LiH"]);
    assert!(out.status.success());
    let e: f64 = value(&out, "e_ccsd").parse().unwrap();
    assert!((e - -7.881165431082408).abs() < 1e-7);
    let out = sqdlab(&["fci", "--molecule", "h2o"]);
    assert_eq!(value(&out, "dim_sym"), "441");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# H2 at a fixed geometry\ngeometry = H 0 0 0; H 0 0 0.74\nbasis = 6-31g\n").unwrap();
    let a = sqdlab(&["fci", "--config", cfg.to_str().unwrap()]);
    let b = sqdlab(&["fci", "--config", cfg.to_str().unwrap(), "--basis", "sto-3g"]);
    assert_eq!(value(&a, "n_orb"), "4");
    assert_eq!(value(&b, "n_orb"), "2");
}

#[test]
fn fcidump_roundtrip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("lih.fcidump");
    assert!(sqdlab(&["integrals", "--molecule", "LiH", "--output", f.to_str().unwrap()]).status.success());
    let a = sqdlab(&["fci", "--molecule", "LiH"]);
    let b = sqdlab(&["fci", "--fcidump", f.to_str().unwrap()]);
    let (ea, eb): (f64, f64) = (value(&a, "e_fci").parse().unwrap(), value(&b, "e_fci").parse().unwrap());
    assert!((ea - eb).abs() < 1e-9);
}

#[test]
fn sqd_from_counts_file() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("h2.counts");
    std::fs::write(&c, "0101 900\n1010 100\n").unwrap();
    let out = sqdlab(&["sqd", "--molecule", "H2", "--counts", c.to_str().unwrap(), "--fci", "true"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let de: f64 = value(&out, "de_sqd_fci").parse().unwrap();
    assert!(de.abs() < 1e-9);
}

#[test]
fn scan_resume_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h2.csv");
    let c = csv.to_str().unwrap();
    let base = ["scan-1d", "--molecule", "H2", "--r-list", "0.6,0.9", "--runs", "2", "--timings", "false", "--output", c];
    let mut cut = base.to_vec();
    cut.extend(["--max-records", "1"]);
    assert_eq!(sqdlab(&cut).status.code(), Some(2));
    let out = sqdlab(&base);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&out, "skipped"), "1");
    let fresh = dir.path().join("fresh.csv");
    let mut again = base.to_vec();
    let last = again.len() - 1;
    again[last] = fresh.to_str().unwrap();
    sqdlab(&again);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&fresh).unwrap());

    let rep = dir.path().join("rep");
    let out = sqdlab(&["report", "--input", c, "--mode", "delta", "--out-dir", rep.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(Path::new(&rep).join("delta_e.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn fatal_errors_exit_with_one() {
    assert_eq!(sqdlab(&["fci", "--molecule", "Unobtainium"]).status.code(), Some(1));
    assert_eq!(sqdlab(&["no-such-command"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "molecul = H2\n").unwrap();
    assert_eq!(sqdlab(&["fci", "-c", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(sqdlab(&["scan-2d", "--molecule", "LiH", "--output", "x.csv"]).status.code(), Some(1));
}
