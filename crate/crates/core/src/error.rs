use thiserror::Error;

pub type Result<T> = std::result::Result<T, FhtError>;

#[derive(Debug, Clone, Error)]
pub enum FhtError {
    #[error("point {t} lies outside the admissible domain: {reason}")]
    Domain { t: f64, reason: &'static str },

    #[error("non-finite sample value at x = {x}")]
    RejectedInput { x: f64 },

    #[error("evaluation point {t} coincides with breakpoint {breakpoint}")]
    SingularPoint { t: f64, breakpoint: f64 },

    #[error("quadrature did not reach tolerance: value {value}, est. error {est_error} after {subdivisions} panels")]
    ConvergenceFailure {
        value: f64,
        est_error: f64,
        subdivisions: usize,
    },

    #[error("spectral partial sums grew by a factor {growth:.3e} (limit {limit:.3e})")]
    Instability { value: f64, growth: f64, limit: f64 },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("at t = {t}: {source}")]
    AtPoint {
        t: f64,
        #[source]
        source: Box<FhtError>,
    },

    #[error("right-hand side is not in the range of T: phi = {phi_value:.6e}, verdict {verdict}")]
    NotInRange { phi_value: f64, verdict: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("csv input: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),
}

impl FhtError {
    pub(crate) fn at(self, t: f64) -> FhtError {
        match self {
            FhtError::AtPoint { .. } => self,
            other => FhtError::AtPoint {
                t,
                source: Box::new(other),
            },
        }
    }
}

impl From<std::io::Error> for FhtError {
    fn from(e: std::io::Error) -> Self {
        FhtError::Io(e.to_string())
    }
}

impl From<csv::Error> for FhtError {
    fn from(e: csv::Error) -> Self {
        FhtError::Csv(e.to_string())
    }
}
