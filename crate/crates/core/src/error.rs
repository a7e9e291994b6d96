use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} lies outside the sampled range [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("|psi| exceeded {limit:e} at x = {x}; rescale the initial data or shrink the domain")]
    MagnitudeOverflow { x: f64, limit: f64 },

    #[error("plane-wave conversion is singular for k = {0}")]
    SingularConversion(num_complex::Complex64),

    #[error("wave function has zero norm")]
    ZeroNorm,

    #[error("grid [{x_min}, {x_max}] is not symmetric about the origin")]
    NonSymmetricGrid { x_min: f64, x_max: f64 },

    #[error("Ermakov radicand is not positive at x = {x} (value {value:e})")]
    RadicandNonPositive { x: f64, value: f64 },

    #[error("alpha' must change sign exactly once, found sign changes at {0:?}")]
    SlopeSignChanges(Vec<f64>),

    #[error("missing state is not normalizable: tail ratio {0:e}")]
    NonNormalizable(f64),

    #[error("truncation x = {x_trunc} too small: boundary |psi| ratio {ratio:e} after {doublings} doublings")]
    TruncationTooSmall { x_trunc: f64, ratio: f64, doublings: usize },

    #[error("method not applicable: {0}")]
    MethodMismatch(String),

    #[error("level {0} outside the supported range 0..=30")]
    LevelOutOfRange(usize),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for bad input or configuration, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MagnitudeOverflow { .. }
            | Error::SingularConversion(_)
            | Error::ZeroNorm
            | Error::NonNormalizable(_)
            | Error::TruncationTooSmall { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
