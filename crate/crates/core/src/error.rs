use thiserror::Error;

/// Refusals raised by the numerical routines.
///
/// Every variant that stems from a tolerance decision carries the numbers
/// that triggered it, so callers can report them or retry with other
/// settings.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Z2Error {
    #[error("matrix is not skew-symmetric: asymmetry {asymmetry:.3e} exceeds {limit:.3e}")]
    NotSkew { asymmetry: f64, limit: f64 },

    #[error("matrix is not a complex structure: residual {residual:.3e}")]
    NotComplexStructure { residual: f64 },

    #[error("matrix is not orthogonal: residual {residual:.3e}")]
    NotOrthogonal { residual: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error(
        "ambiguous kernel: largest discarded value {discarded:.3e}, smallest kept value {kept:.3e}, kernel_tol {kernel_tol:.3e}, gap_ratio {gap_ratio}"
    )]
    AmbiguousKernel {
        discarded: f64,
        kept: f64,
        kernel_tol: f64,
        gap_ratio: f64,
    },

    #[error("kernel dimension {0} is odd; cannot complete to a complex structure")]
    OddKernel(usize),

    #[error("window radius {radius:.6e} lies within {kernel_tol:.3e} of eigenvalue {eigenvalue:.6e}")]
    WindowOnEigenvalue {
        radius: f64,
        eigenvalue: f64,
        kernel_tol: f64,
    },

    #[error("frames too far apart: projector distance {distance:.4} >= 1/2")]
    FramesTooFar { distance: f64 },

    #[error("endpoint kernel dimension {found} exceeds the minimal dimension {minimal}")]
    NonMinimalKernel { found: usize, minimal: usize },

    #[error("partition refinement exhausted at depth {max_depth} near t = {t:.6}")]
    RefinementExhausted { max_depth: usize, t: f64 },

    #[error("phase-sum formula requires even dimension, got {0}")]
    OddDimension(usize),

    #[error("crossing count requires an analytic path")]
    NotAnalyticHint,

    #[error("unresolved crossing near t = {t:.10}: smallest singular value {value:.3e}")]
    UnresolvedCrossing { t: f64, value: f64 },

    #[error("window frame does not split cleanly into the selected region: weight {weight:.3}")]
    SectorMixing { weight: f64 },

    #[error("region part of the window is not decoupled: leakage {leakage:.3e} at radius {radius:.3e}")]
    RegionLeakage { leakage: f64, radius: f64 },

    #[error("loop sampler does not close: |T(1) - T(0)| = {0:.3e}")]
    OpenLoop(f64),

    #[error("numerical check failed: {what} residual {residual:.3e} > {limit:.3e}")]
    CheckFailed {
        what: &'static str,
        residual: f64,
        limit: f64,
    },
}

impl Z2Error {
    /// True for refusals caused by a tolerance or conditioning decision, as
    /// opposed to malformed input.
    pub fn is_numerical_refusal(&self) -> bool {
        !matches!(
            self,
            Z2Error::DimensionMismatch(..) | Z2Error::InvalidTolerance(_) | Z2Error::NotAnalyticHint
        )
    }
}

pub type Result<T> = std::result::Result<T, Z2Error>;
