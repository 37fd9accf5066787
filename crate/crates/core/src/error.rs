use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("derivative order m = {0} is not discretized (only m = 1)")]
    UnsupportedOrder(u32),

    #[error("quadrature overflow at r = {radius:e}")]
    QuadratureOverflow { radius: f64 },

    #[error("pair is not normalized: norm = {norm}")]
    Normalization { norm: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("grid mismatch: expected {expected} nodes, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("no Nehari root on the ray up to t = {t_max:e}")]
    NoNehariRoot { t_max: f64 },

    #[error("nonlinearity vanishes identically along the ray")]
    DegenerateRay,

    #[error("solver hit the iteration limit ({0})")]
    MaxIterations(usize),

    #[error("line search failed at iteration {0}")]
    LineSearchFailure(usize),

    #[error("growth-bound fit failed: {0}")]
    FitFailure(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
