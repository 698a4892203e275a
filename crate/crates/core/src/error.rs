use thiserror::Error;

/// Errors raised by the film solver, coefficient integration and orbit integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilmError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("shaft state outside the clearance circle: e = {eccentricity:e} m >= c = {clearance:e} m")]
    InvalidState { eccentricity: f64, clearance: f64 },

    #[error("grid shape error: {0}")]
    GridShape(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("static film has no pressurized nodes although e = {eccentricity:e} m > 0")]
    InconsistentMask { eccentricity: f64 },

    #[error("required eccentricity ratio {eps:.4} is outside the admissible range (limit {limit})")]
    OutOfRange { eps: f64, limit: f64 },

    #[error("short-bearing closed form is outside its validity range: {0}")]
    Domain(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<FilmError>,
    },
}

pub type FilmResult<T> = Result<T, FilmError>;

impl FilmError {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        FilmError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Innermost error, looking through step wrappers.
    pub fn root(&self) -> &FilmError {
        match self {
            FilmError::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
