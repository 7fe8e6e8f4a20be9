use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid dissipation profile: {0}")]
    Profile(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("bloch reduction not valid: {0}")]
    NotTranslationInvariant(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("eigenpair residual {residual:.3e} exceeds bound {bound:.3e} (pair {index})")]
    Residual { index: usize, residual: f64, bound: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("gap closes on the sampling grid (min gap {0:.3e})")]
    GapClosed(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("netlist: {0}")]
    Netlist(String),
}

pub type Result<T> = std::result::Result<T, Error>;
