use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Every violated constraint, not only the first.
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("exact solver needs omega0/Gamma >= 1e3 (Markovian regime), got {ratio:.3e}")]
    MarkovGuard { ratio: f64 },

    #[error("eigendecomposition near an exceptional point (completeness residual {residual:.3e})")]
    ExceptionalPoint { residual: f64 },

    #[error("eigensolver failed to converge after {iterations} QR sweeps")]
    NoConvergence { iterations: usize },

    #[error(
        "near-singular scattering system (condition {cond:.3e}); nearest mode denominator eps = {epsilon}"
    )]
    Singular {
        cond: f64,
        epsilon: Complex64,
        mode: Option<usize>,
    },

    #[error("Gamma_f = {gamma_f:.6e} is within {distance:.3e} of the lasing threshold -Gamma_edge = {threshold:.6e}")]
    ThresholdExcluded {
        gamma_f: f64,
        threshold: f64,
        distance: f64,
    },

    #[error("integration failed at t = {t:.6}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("no interior minimum in [{lo:.6e}, {hi:.6e}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("decay fit: {0}")]
    Fit(String),
}

impl Error {
    /// True for failures caused by the lasing-threshold divergence.
    pub fn is_singularity(&self) -> bool {
        matches!(self, Error::Singular { .. } | Error::ThresholdExcluded { .. })
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParams(_) | Error::MarkovGuard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
