use thiserror::Error;

/// Errors raised by curve construction and the billiard computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A specification field failed validation.
    #[error("invalid curve spec: `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    /// Construction produced a degenerate curve (zero length, crossing samples, ...).
    #[error("degenerate curve: `{parameter}`: {reason}")]
    Degenerate { parameter: String, reason: String },

    #[error("derivative order {0} requested, at most 4 is supported")]
    DerivativeOrder(usize),

    #[error("chord ({x}, {y}) is too close to the diagonal")]
    DiagonalChord { x: f64, y: f64 },

    #[error("curvature vanishes near x = {x} (k = {k:e})")]
    ZeroCurvature { x: f64, k: f64 },

    #[error("curve is not nice: {0}")]
    NotNice(String),

    #[error("no reflection root found: {0}")]
    NoRoot(String),

    #[error("operation requires a closed curve")]
    OpenCurve,

    #[error("{op} did not converge: {detail}")]
    NotConverged { op: &'static str, detail: String },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("periodic search for (p={p}, q={q}) collapsed to period {period}")]
    CollapsedWinding { p: usize, q: usize, period: usize },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("line geometry: {0}")]
    Geometry(String),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
