use thiserror::Error;

/// Errors raised by the model, sampler, estimators and tests.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("frequency unusable at u = {u}: |phi| = {modulus:e} is below the floor")]
    FloorBreach { u: f64, modulus: f64 },

    #[error("winding ambiguity at u = {u}: {reason}")]
    WindingAmbiguity { u: f64, reason: String },

    #[error("degenerate acceptance interval [{lower}, {upper}]")]
    DegenerateInterval { lower: f64, upper: f64 },

    #[error("sample size too small: {0}")]
    SampleTooSmall(String),

    #[error("statistic undefined: {0}")]
    StatisticUndefined(String),

    #[error("regime precondition violated: {0}")]
    RegimePrecondition(String),

    #[error("singular weight system: {0}")]
    SingularSystem(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty sample")]
    EmptySample,

    #[error("io error: {0}")]
    Io(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

impl LevyError {
    /// True for failures that stem from the data (floor breach, winding, undefined
    /// statistic) rather than from invalid inputs. The harness counts these as a
    /// separate outcome class.
    pub fn is_runtime_failure(&self) -> bool {
        matches!(
            self,
            LevyError::FloorBreach { .. }
                | LevyError::WindingAmbiguity { .. }
                | LevyError::StatisticUndefined(_)
        )
    }
}

impl From<std::io::Error> for LevyError {
    fn from(e: std::io::Error) -> Self {
        LevyError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LevyError>;
