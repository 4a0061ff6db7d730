use thiserror::Error;

/// Every failure the library can report. The command-line front end maps these
/// onto exit codes, so keep the grouping stable: [`Error::is_capacity`] picks
/// out the resource-limit cases, everything else is a numeric/domain failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("input is not sorted ascending (position {0})")]
    NotSorted(usize),
    #[error("over-trimming: {0}")]
    OverTrim(String),
    #[error("block geometry: {0}")]
    Geometry(String),
    #[error("moment of order {order} diverges")]
    MomentDivergence { order: u32 },
    #[error("target {target} outside attainable range [{lo}, {hi}]")]
    Range { target: f64, lo: f64, hi: f64 },
    #[error("unsupported sobol dimension {0}")]
    UnsupportedDimension(usize),
    #[error("grid resolution: {0}")]
    Resolution(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
