use thiserror::Error;

/// Error type shared by the whole library. Numeric payloads are carried as
/// `f64` so the type stays independent of the scalar parameter.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("point outside the field's domain of definition")]
    OutsideDomain,

    #[error("field is singular at the requested point")]
    SingularPoint,

    #[error("refinement stalled above tolerance (last estimate {value}, change {change})")]
    NoConvergence { value: f64, change: f64 },

    #[error("Monte Carlo variance too high (value {value}, stderr {stderr})")]
    HighVariance { value: f64, stderr: f64 },

    #[error("could not bracket the level-set boundary in [{lo}, {hi}]")]
    LevelSetResolutionFailure { lo: f64, hi: f64 },

    #[error("angular kernel evaluated too close to the diagonal r1={r1}, r2={r2}")]
    DiagonalSingularity { r1: f64, r2: f64 },

    #[error("sphere-constant cross-check failed: closed form {closed_form} vs quadrature {quadrature}")]
    QuadratureMismatch { closed_form: f64, quadrature: f64 },

    #[error("field exceeds the normalized energy budget: {measured} > {budget}")]
    BudgetViolated { measured: f64, budget: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
