use thiserror::Error;

/// Every failure the toolkit can report.
///
/// The variants are grouped by what the command line maps them to:
/// configuration problems, numerical failures and certificate failures.
#[derive(Debug, Error)]
pub enum TurnwaveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid size {0} must be even for the alternating-point rule")]
    OddGrid(usize),

    #[error("self-intersection: nodes {i} and {j} coincide")]
    SelfIntersection { i: usize, j: usize },

    #[error("curve is not a graph: min slope {min_slope:.3e} at alpha = {alpha:.6}")]
    NotAGraph { min_slope: f64, alpha: f64 },

    #[error("closure iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    ClosureIteration { iterations: usize, residual: f64 },

    #[error("blow-up at t = {t:.6}: {what}")]
    BlowUp { t: f64, what: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("backward run lost the graph property (min slope {min_slope:.3e}); delta is too large")]
    DeltaTooLarge { min_slope: f64 },

    #[error("time {t} outside the weight window [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("trajectory does not cover the requested window: {0}")]
    MissingCoverage(String),

    #[error("singular parameterization: |dz| vanishes near alpha = {alpha:.6}")]
    SingularParameterization { alpha: f64 },

    #[error("insufficient analyticity for half-width {r}: amplified tail {tail:.3e}")]
    InsufficientAnalyticity { r: f64, tail: f64 },

    #[error("singular complex kernel (arc-chord margin {margin:.3e})")]
    SingularKernel { margin: f64 },

    #[error("degenerate complex tangent: {0}")]
    Degenerate(String),

    #[error("successive approximations did not converge; history {history:?}")]
    NonConvergence { history: Vec<f64> },

    #[error("iterate left the admissible set at t = {t:.6}: {reason}")]
    RegimeExit { t: f64, reason: String },

    #[error("strip geometries differ")]
    MismatchedStrips,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("turning certificate failed: {0}")]
    Certificate(String),

    #[error("expected event did not occur: {0}")]
    NoEvent(String),

    #[error("trajectory check failed: {0}")]
    VerifyFailed(String),

    #[error("{scenario}: {source}")]
    Scenario { scenario: String, source: Box<TurnwaveError> },

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl TurnwaveError {
    /// Process exit status used by the command line: 2 config, 3 numerics, 4 certificate.
    pub fn exit_code(&self) -> i32 {
        match self {
            TurnwaveError::Scenario { source, .. } => source.exit_code(),
            TurnwaveError::Config(_) => 2,
            TurnwaveError::Certificate(_) => 4,
            TurnwaveError::Io(_) | TurnwaveError::Json(_) | TurnwaveError::Missing(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, TurnwaveError>;
