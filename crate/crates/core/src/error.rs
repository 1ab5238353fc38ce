use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "constraint violation: {quantity} = {value:.3e} at r = {at} (tolerance {tolerance:.1e})"
    )]
    ConstraintViolation {
        quantity: String,
        at: f64,
        value: f64,
        tolerance: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("negative eigenvalue {value:.3e} after curvature shift (wrong input table?)")]
    NegativeEigenvalue { value: f64 },

    #[error("insufficient levels: requested {requested} levels, inputs complete only through {complete_through:.6}")]
    InsufficientLevels {
        requested: usize,
        complete_through: f64,
    },

    #[error("singular weight {value:.3e} at t = {at}")]
    SingularWeight { at: f64, value: f64 },

    #[error("bisection for eigenvalue #{index} stalled with bracket width {width:.3e}")]
    ConvergenceFailure { index: usize, width: f64 },

    #[error("mode truncation unsafe: excluded modes start at {floor:.6}, but entry #{count} is {found:.6}")]
    TruncationUnsafe {
        floor: f64,
        found: f64,
        count: usize,
    },

    #[error("nonpositive input: {0}")]
    NonpositiveInput(String),

    #[error("quadrature and closed form disagree for {quantity}: {quadrature} vs {closed_form}")]
    QuadratureMismatch {
        quantity: String,
        quadrature: f64,
        closed_form: f64,
    },

    #[error("verification failed: {0}")]
    CheckFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 2 for invalid input or a violated constraint, 1 for
    /// internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConvergenceFailure { .. }
            | Error::QuadratureMismatch { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
