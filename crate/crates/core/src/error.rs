use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial degree {0} is out of range (maximum {max})", max = crate::hermite::MAX_DEGREE)]
    DegreeOutOfRange(u32),

    #[error("quadrature order {order} cannot integrate degrees {m} and {n} exactly (need at least {need})", need = m + n + 1)]
    QuadratureOrder { order: usize, m: u32, n: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown wavelet `{0}`")]
    UnknownWavelet(String),

    #[error("signal length {0} must be even and at least 2")]
    OddLength(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{levels} decomposition levels requested for a {width}x{height} image (allowed 1..={max})")]
    LevelsOutOfRange {
        levels: usize,
        width: usize,
        height: usize,
        max: usize,
    },

    #[error("non-finite sample encountered")]
    NonFinite,

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("reference pyramid has zero energy")]
    ZeroEnergy,

    #[error("corrupt container: {0}")]
    CorruptContainer(String),
}
