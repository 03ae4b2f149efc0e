use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid landscape: {0}")]
    InvalidLandscape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A maximum with a vanishing (or positive) curvature eigenvalue.
    #[error("degenerate peak at x = {location}: curvature {curvature:e} is not strictly negative")]
    DegeneratePeak { location: f64, curvature: f64 },

    #[error("peak at x = {0} is not stationary")]
    NonStationaryPeak(f64),

    /// Every peak sees a zero initial density, so no weight can be assigned.
    #[error("initial density vanishes at every maximum point of r")]
    EmptySupport,

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("negative density {value:e} at node {node}, t = {t}")]
    NegativeDensity { t: f64, node: usize, value: f64 },

    #[error("explicit solution needs min r > 0, found {0:e}")]
    OracleUnavailable(f64),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from rejected input rather than from a run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidLandscape(_)
                | Error::InvalidInput(_)
                | Error::DegeneratePeak { .. }
                | Error::NonStationaryPeak(_)
                | Error::EmptySupport
                | Error::StepTooLarge { .. }
                | Error::OracleUnavailable(_)
                | Error::Config { .. }
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Instability { .. } | Error::NegativeDensity { .. } | Error::NoConvergence { .. }
        )
    }
}
