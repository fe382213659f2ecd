use std::path::PathBuf;

/// Errors raised anywhere in the library.
///
/// `Domain` covers inputs that are well formed but outside the mathematical
/// domain of an operation (non-real densities, defocusing ground states, zero
/// fields). `Usage` covers caller mistakes such as mixing grids.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("ground state iteration did not converge after {iterations} iterations (last residual {last_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },

    #[error("non-finite values at t = {t} after step {step}")]
    Overflow {
        t: f64,
        step: usize,
        /// Last state whose values were all finite.
        last_finite: Box<crate::evolution::SimulationState>,
    },

    #[error("no blow-up regime detected: {0}")]
    NoBlowup(String),

    #[error("second moment invalid (boundary contaminated) at t = {0}")]
    InvalidMoment(f64),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("resolution guard violated: target dx requires |t| >= {min_abs_t}")]
    Resolution { min_abs_t: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("snapshot {path}: {msg}")]
    Snapshot { path: PathBuf, msg: String },

    #[error("checksum mismatch in {region} of {path}")]
    Checksum { path: PathBuf, region: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that come from how the tool was invoked rather than
    /// from the mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
