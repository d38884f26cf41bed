//! `key = value` configuration files merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use clap::Args;

macro_rules! overrides {
    ($($field:ident => $flag:literal : $help:literal),* $(,)?) => {
        /// Every configuration key is also a flag; flags win over the file.
        #[derive(Args, Debug, Default, Clone)]
        pub struct Overrides {
            /// Plain-text `key = value` configuration file.
            #[arg(long, short = 'c', value_name = "FILE", global = true)]
            pub config: Option<std::path::PathBuf>,
            $(
                #[arg(long = $flag, value_name = "VALUE", help = $help, global = true)]
                pub $field: Option<String>,
            )*
        }

        impl Overrides {
            fn pairs(&self) -> Vec<(&'static str, Option<&String>)> {
                vec![$((stringify!($field), self.$field.as_ref())),*]
            }
        }

        pub const KEYS: &[&str] = &[$(stringify!($field)),*];
    };
}

overrides! {
    molecule => "molecule": "Built-in system name (H2, LiH, BeH2, H2O, NH3, ligands, amantadine) or scan molecule",
    geometry => "geometry": "Inline geometry `Sym x y z; ...` (overrides molecule)",
    charge => "charge": "Net charge for an inline geometry [0]",
    unit => "unit": "angstrom | bohr [angstrom]",
    basis => "basis": "sto-3g | 6-31g [sto-3g]",
    fcidump => "fcidump": "Read integrals from an FCIDUMP instead of a molecule",
    output => "output": "Output file",
    seed => "seed": "Master seed [0]",
    n_shots => "n-shots": "Shots per sampling call [10000]",
    samples_per_batch => "samples-per-batch": "SQD samples per batch: integer, 1e8 or sqrt [1e8]",
    iterations => "iterations": "SQD recovery iterations [10]",
    batches => "batches": "SQD batches per iteration [1]",
    ansatz => "ansatz": "lucj | lucj-ladder | qeb [lucj]",
    lucj_reps => "lucj-reps": "LUCJ layers [1]",
    p_ro => "p-ro": "Readout flip probability [0]",
    p2 => "p2": "Two-qubit depolarizing probability [0]",
    trajectories => "trajectories": "Noisy circuit trajectories [100]",
    counts => "counts": "Counts file to diagonalize instead of sampling",
    counts_out => "counts-out": "Write the sampled counts here",
    runs => "runs": "Runs per grid point [3 for 1D, 1 for 2D]",
    r_list => "r-list": "Comma-separated bond lengths in Angstrom (default: tabulated list)",
    r_min => "r-min": "2D grid r start [0.85]",
    r_max => "r-max": "2D grid r stop [1.20]",
    n_r => "n-r": "2D grid r points [32]",
    theta_min => "theta-min": "2D grid angle start in degrees [85]",
    theta_max => "theta-max": "2D grid angle stop in degrees [115]",
    n_theta => "n-theta": "2D grid angle points [32]",
    stride => "stride": "Keep every stride-th 2D node per axis [1]",
    workers => "workers": "Geometries solved per flushed batch [4]",
    timings => "timings": "Record stage timings (true | false) [true]",
    ccsd => "ccsd": "Run CCSD in `scf` (true | false) [true]",
    fci => "fci": "Compute the exact reference per point (true | false) [true]",
    sleep => "sleep": "Inter-run delay in seconds; accepted and ignored [0]",
    max_records => "max-records": "Stop after this many new rows",
    solver => "solver": "DMET impurity solver: casci | ccsd | sqd [casci]",
    fragments => "fragments": "atoms | heavy | whole | explicit groups `0,1;2` [atoms]",
    localization => "localization": "metalowdin | lowdin [metalowdin]",
    window => "window": "Impurity HOMO,LUMO window such as `4,4`, or `none` [4,4]",
    trace => "trace": "Write the DMET iteration trace CSV here",
    mode => "mode": "Report mode: delta | eta | grid | rank | all [all]",
    input => "input": "Scan CSV to report on",
    out_dir => "out-dir": "Directory for report tables [.]",
}

#[derive(Debug, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

/// Parse `key = value` lines; `#` starts a comment, dashes in keys are
/// read as underscores.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", no + 1))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key `{key}`", no + 1));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl Settings {
    pub fn load(o: &Overrides) -> Result<Self, String> {
        let mut map = match &o.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        for (k, v) in o.pairs() {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str).filter(|s| !s.is_empty())
    }

    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("{key} = {v}: {e}")))
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    pub fn require(&self, key: &str) -> Result<&str, String> {
        self.get(key).ok_or_else(|| format!("missing `{key}` (config key or --{} flag)", key.replace('_', "-")))
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# scan\nmolecule = H2\nn-shots=500  # inline\n\n").unwrap();
        assert_eq!(m["molecule"], "H2");
        assert_eq!(m["n_shots"], "500");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("molecule").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "basis = 6-31g\nseed = 3\n").unwrap();
        let o = Overrides {
            config: Some(p),
            seed: Some("9".into()),
            ..Overrides::default()
        };
        let s = Settings::load(&o).unwrap();
        assert_eq!(s.get("basis"), Some("6-31g"));
        assert_eq!(s.parse_or("seed", 0u64).unwrap(), 9);
        assert_eq!(s.parse_or("runs", 3usize).unwrap(), 3);
        assert!(s.require("output").is_err());
    }
}
