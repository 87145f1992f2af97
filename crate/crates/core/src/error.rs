use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "quadrature did not converge for {what}: achieved relative error {achieved:.3e}, requested {requested:.3e}"
    )]
    Quadrature {
        what: String,
        achieved: f64,
        requested: f64,
    },

    #[error("hermite grid orthonormality residual {residual:.3e} exceeds {limit:.1e}")]
    Orthonormality { residual: f64, limit: f64 },

    #[error("truncation overflow: need {needed} modes, have {available}")]
    Truncation { needed: usize, available: usize },

    #[error("kernel tables cover modes < {covered}, need {needed}")]
    TableCoverage { covered: usize, needed: usize },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("non-finite state at t = {time}: {detail}")]
    NonFinite { time: f64, detail: String },

    #[error("picard iteration failed to contract: ratio {ratio:.3} at iterate {iterate}")]
    NonContraction { iterate: usize, ratio: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("empty time series")]
    EmptySeries,

    #[error("interpolation resolution insufficient: {0}")]
    Resolution(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Orthonormality { .. }
                | Error::NonFinite { .. }
                | Error::NonContraction { .. }
                | Error::Truncation { .. }
                | Error::Resolution(_)
                | Error::DegenerateFit(_)
        )
    }
}
