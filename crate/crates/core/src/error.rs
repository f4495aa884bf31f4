use thiserror::Error;

/// Errors raised by knot generation, assembly and the linear solves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BkmError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: knots {first} and {second} are {distance:e} apart")]
    DegenerateGeometry {
        first: usize,
        second: usize,
        distance: f64,
    },

    /// The 1-norm condition estimate exceeded the solver's limit.
    #[error("ill-conditioned {context} system: condition estimate {estimate:e} exceeds {limit:e}")]
    IllConditioned {
        context: &'static str,
        estimate: f64,
        limit: f64,
    },

    #[error("singular {context} system: zero pivot in column {column}")]
    Singular {
        context: &'static str,
        column: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, BkmError>;

pub(crate) fn invalid(msg: impl Into<String>) -> BkmError {
    BkmError::InvalidArgument(msg.into())
}
