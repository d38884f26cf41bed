use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("unsupported element {0}")]
    UnknownElement(String),
    #[error("basis: {0}")]
    Basis(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("fcidump: {0}")]
    Fcidump(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{method} did not converge after {iterations} iterations (last energy {last_energy:.12})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        last_energy: f64,
    },
    #[error("{method} diverged at iteration {iteration}")]
    Diverged { method: &'static str, iteration: usize },
    #[error("vanishing denominator for orbitals ({0}, {1}, {2}, {3})")]
    Denominator(usize, usize, usize, usize),
    #[error("no sampled configuration falls in the ({n_alpha}, {n_beta}) sector ({n_unique} unique raw strings)")]
    EmptySector {
        n_alpha: usize,
        n_beta: usize,
        n_unique: usize,
    },
    #[error("space too large: {0} determinants")]
    SpaceTooLarge(u128),
    #[error("dmet fragment {fragment}: {message}")]
    Dmet { fragment: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
