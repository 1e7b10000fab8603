use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("singular matrix (det = 0) cannot define a solenoid")]
    Singular,
    #[error("matrix is not hyperbolic: eigenvalue modulus {modulus} is within {tolerance} of 1")]
    NotHyperbolic { modulus: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operands are defined over different matrices")]
    MatrixMismatch,
    #[error("torus point {0} is not periodic under the matrix")]
    NotPeriodic(String),
    #[error("backward chain is inconsistent at index {0}: x_j != A x_(j+1)")]
    InconsistentChain(usize),
    #[error("point is not in the fiber over [0]")]
    NotInFiber,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("transition matrix is reducible: state {to} is not reachable from state {from}")]
    Reducible { from: usize, to: usize },
    #[error("inadmissible word: transition {from} -> {to} at position {position}")]
    InadmissibleWord { from: usize, to: usize, position: usize },
    #[error("unstable dimension is {0}, expected 1")]
    UnstableDimension(usize),
    #[error("invalid rates: {0}")]
    InvalidRates(String),
    #[error("point outside the solid torus: |z| = {0}")]
    OutsideSolidTorus(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("perturbation too large: Lipschitz constant {lipschitz} exceeds the admissible bound {required}")]
    PerturbationTooLarge { lipschitz: f64, required: f64 },
    #[error("invalid combination (dim Λ = {dim_lambda}, dim E^u = {dim_eu}): {reason}")]
    InvalidCombination {
        dim_lambda: usize,
        dim_eu: usize,
        reason: &'static str,
    },
    #[error("orbit left the ambient bounds at iterate {iterate}")]
    Divergence { iterate: usize },
    #[error("tangent frame degenerated after {attempts} attempts")]
    FrameDegenerate { attempts: usize },
    #[error("unsupported system: {0}")]
    Unsupported(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
