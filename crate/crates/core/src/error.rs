use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin: two_j must be a positive integer, got {0}")]
    InvalidSpin(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The field circle passes through the degeneracy at t = 0, so the
    /// starting eigenstate is not defined.
    #[error("degenerate start: H(0) has a repeated eigenvalue")]
    DegenerateStart,

    #[error("input matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    /// Overlap of the two arm states is below the orthogonality tolerance;
    /// the relative phase is undefined.
    #[error("orthogonal states{}", fmt_index(*.index))]
    OrthogonalStates { index: Option<usize> },

    #[error("non-quantized winding: delta alpha / 2pi = {ratio}, residual {residual}")]
    NonQuantizedWinding { ratio: f64, residual: f64 },

    #[error("loop passes through the observation point")]
    DegenerateLoop,

    #[error("string meets the loop boundary")]
    StringOnBoundary,

    #[error("refinement depth exceeded between samples {index} and {}", index + 1)]
    RefinementDepthExceeded { index: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_index(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" at sample {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Short machine-readable name of the failure kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "InvalidSpin",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DegenerateStart => "DegenerateStart",
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::OrthogonalStates { .. } => "OrthogonalStates",
            Error::NonQuantizedWinding { .. } => "NonQuantizedWinding",
            Error::DegenerateLoop => "DegenerateLoop",
            Error::StringOnBoundary => "StringOnBoundary",
            Error::RefinementDepthExceeded { .. } => "RefinementDepthExceeded",
            Error::InvalidCircuit(_) => "InvalidCircuit",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// True for failures of the numerics on valid input, as opposed to
    /// malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateStart
                | Error::NonHermitianInput { .. }
                | Error::OrthogonalStates { .. }
                | Error::NonQuantizedWinding { .. }
                | Error::DegenerateLoop
                | Error::StringOnBoundary
                | Error::RefinementDepthExceeded { .. }
        )
    }

    /// Sample index the failure refers to, when known.
    pub fn sample_index(&self) -> Option<usize> {
        match self {
            Error::OrthogonalStates { index } => *index,
            Error::RefinementDepthExceeded { index } => Some(*index),
            _ => None,
        }
    }
}
