use thiserror::Error;

/// Errors raised by evaluators, builders and decision procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quantile for p = {p} is not bracketed below x = {x_max:e}")]
    UnboundedQuantile { p: f64, x_max: f64 },

    #[error("FGM coefficients must satisfy sum_{{i<j}} |c_ij| <= 1, got {sum}")]
    FgmConstraint { sum: f64 },

    #[error("unsupported dependence: {0}")]
    UnsupportedDependence(String),

    #[error("system tree depth {depth} exceeds the supported maximum of 2")]
    Depth { depth: usize },

    #[error("no exponential-type tail asymptote: {0}")]
    NoExponentialAsymptote(String),

    #[error("singular point at x = {x}: the density vanishes")]
    SingularPoint { x: f64 },

    #[error("tail underflows on the whole probe sequence; retry with a smaller starting point than x0 = {x0}")]
    Underflow { x0: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { field: field.into(), message: message.into() }
    }
}
