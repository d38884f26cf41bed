use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Samples per batch ε_s: a literal budget or ⌊√|S|⌉.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplesPerBatch {
    Fixed(u64),
    SqrtSpace,
}

impl SamplesPerBatch {
    /// Unbounded budget (no subsampling on any realistic shot count).
    pub const UNBOUNDED: SamplesPerBatch = SamplesPerBatch::Fixed(100_000_000);

    pub fn resolve(self, space_size: u128) -> u64 {
        match self {
            SamplesPerBatch::Fixed(n) => n,
            SamplesPerBatch::SqrtSpace => ((space_size as f64).sqrt().round() as u64).max(1),
        }
    }
}

impl fmt::Display for SamplesPerBatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplesPerBatch::Fixed(n) => write!(f, "{n}"),
            SamplesPerBatch::SqrtSpace => f.write_str("sqrt"),
        }
    }
}

impl FromStr for SamplesPerBatch {
    type Err = Error;

    /// Accepts `sqrt`, an integer, or a float literal such as `1e8`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "sqrt" || t == "sqrt(s)" || t == "sqrt(|s|)" {
            return Ok(SamplesPerBatch::SqrtSpace);
        }
        let v: f64 = t.parse().map_err(|_| Error::Invalid(format!("samples per batch `{s}`")))?;
        if !(v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
            return Err(Error::Invalid(format!("samples per batch must be a positive integer, got `{s}`")));
        }
        Ok(SamplesPerBatch::Fixed(v as u64))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SQDConfig {
    pub n_iterations: usize,
    pub samples_per_batch: SamplesPerBatch,
    pub n_batches: usize,
    pub davidson_max_cycles: usize,
    pub seed: u64,
}

impl Default for SQDConfig {
    fn default() -> Self {
        Self {
            n_iterations: 10,
            samples_per_batch: SamplesPerBatch::UNBOUNDED,
            n_batches: 1,
            davidson_max_cycles: 200,
            seed: 0,
        }
    }
}

impl SQDConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iterations == 0 || self.n_batches == 0 || self.davidson_max_cycles == 0 {
            return Err(Error::Invalid("SQD iterations, batches and Davidson cycles must be at least 1".into()));
        }
        if self.samples_per_batch == SamplesPerBatch::Fixed(0) {
            return Err(Error::Invalid("samples per batch must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_budget() {
        assert_eq!("1e8".parse::<SamplesPerBatch>().unwrap(), SamplesPerBatch::Fixed(100_000_000));
        assert_eq!("sqrt".parse::<SamplesPerBatch>().unwrap(), SamplesPerBatch::SqrtSpace);
        assert!("0".parse::<SamplesPerBatch>().is_err());
        assert!("2.5".parse::<SamplesPerBatch>().is_err());
        assert_eq!(SamplesPerBatch::SqrtSpace.resolve(1225), 35);
        assert_eq!(SamplesPerBatch::SqrtSpace.resolve(441), 21);
    }
}
