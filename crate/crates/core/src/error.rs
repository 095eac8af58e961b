//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by models, quadrature, solvers and verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("model does not provide {0}")]
    MissingEvaluator(&'static str),
    #[error("model lacks required symmetry: {0}")]
    MissingSymmetry(&'static str),
    #[error("evaluation at declared singular point {0:?}")]
    SingularPoint(Vec<f64>),
    #[error("point {point:?} lies within {dist:e} of a jump surface")]
    NearJump { point: Vec<f64>, dist: f64 },
    #[error("Hadamard condition violated: rank-one residual {0:e}")]
    Hadamard(f64),
    #[error("traction continuity violated: |[P]n| = {0:e}")]
    TractionJump(f64),
    #[error("p* disagreement between sides: {0:e}")]
    PstarSides(f64),
    #[error("non-finite integrand at node {index} ({point:?})")]
    NonFinite { index: usize, point: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no root in bracket [{lo}, {hi}]: {what}")]
    NoRoot { what: String, lo: f64, hi: f64 },
    #[error("ellipticity lost at r = {0}")]
    Ellipticity(f64),
    #[error("trajectory left the admissible cone at r = {r}: eta = {eta}, eta' = {deta}")]
    ConeExit { r: f64, eta: f64, deta: f64 },
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("no real shock speed: [P]/[F] = {0}")]
    NoShockSpeed(f64),
    #[error("shock position {s} outside interval [{a}, {b}]")]
    ShockOutside { s: f64, a: f64, b: f64 },
    #[error("boundary data mismatch: {0:e}")]
    BoundaryMismatch(f64),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("unknown scenario '{name}'; available: {available}")]
    UnknownScenario { name: String, available: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for the CLI: 2 configuration, 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownScenario { .. }
            | Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
