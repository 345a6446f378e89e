use thiserror::Error;

/// Failures raised by the jet, frame and ladder layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopfError {
    #[error("form order {order} outside 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },
    #[error("form of order {order} applied to {got} arguments")]
    ArityMismatch { order: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
    #[error("finite-difference jets are limited to order 4 (requested {0})")]
    FiniteDifferenceOrder(usize),
    #[error(
        "analytic partial derivative unavailable for component {component}, multi-index {multi:?}"
    )]
    NoAnalyticPartial { component: usize, multi: Vec<usize> },
    #[error("not a Hopf point: {0}")]
    NotHopf(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("eigenvector normalization undefined: {0}")]
    Normalization(String),
    #[error("resonance at (j,k) = ({j},{k}): {detail}")]
    Resonance { j: usize, k: usize, detail: String },
    #[error("coefficient h_{j}{k} needed but not yet computed")]
    MissingPrerequisite { j: usize, k: usize },
    #[error("jet of order {have} too shallow, ladder up to l{up_to} needs order {need}")]
    JetTooShallow {
        have: usize,
        need: usize,
        up_to: usize,
    },
    #[error("ladder index {0} outside 1..=4")]
    LadderIndex(usize),
    #[error("diagonal right-hand side at ({j},{j}) is not real (relative imaginary part {rel:e})")]
    ComplexDiagonal { j: usize, rel: f64 },
}

pub type Result<T> = std::result::Result<T, HopfError>;
