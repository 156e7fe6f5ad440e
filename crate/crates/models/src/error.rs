use thiserror::Error;
use z2flow::Z2Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Core(#[from] Z2Error),

    #[error("spectral gap closed at {param} = {at:.6}: smallest |E| = {gap:.3e} <= {tol:.3e}")]
    GapClosed {
        param: &'static str,
        at: f64,
        gap: f64,
        tol: f64,
    },

    #[error("matrix violates the particle-hole symmetry: residual {residual:.3e}")]
    NotBdGSymmetric { residual: f64 },

    #[error("no gauge transformation relates the two Hamiltonians: residual {residual:.3e}")]
    NotGaugeEquivalent { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ModelError {
    /// True for refusals driven by a tolerance or gap decision.
    pub fn is_numerical_refusal(&self) -> bool {
        match self {
            ModelError::Core(e) => e.is_numerical_refusal(),
            ModelError::GapClosed { .. }
            | ModelError::NotBdGSymmetric { .. }
            | ModelError::NotGaugeEquivalent { .. } => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;
