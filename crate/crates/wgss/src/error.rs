use hopf_core::HopfError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WgssError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error("invalid parameter file: {0}")]
    Config(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error(
        "Newton did not converge after {iterations} iterations (residual history {history:?})"
    )]
    NoConvergence {
        iterations: usize,
        history: Vec<f64>,
    },
    #[error("continuation failed at kappa = {kappa}; last good point {last:?}")]
    Continuation {
        kappa: f64,
        last: Option<(f64, f64, f64)>,
    },
    #[error("eigenvalue tracking failed: {0}")]
    Tracking(String),
    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, WgssError>;
