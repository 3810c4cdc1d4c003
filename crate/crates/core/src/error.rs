use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Discrete density of a cell fell below [`crate::RHO_FLOOR`].
    DegenerateCell { cell: usize, rho: f64 },
    NonPositiveTemperature(f64),
    /// The temperature tensor of the ES-BGK Gaussian is not positive definite.
    NonSpdTensor { min_eigenvalue: f64 },
    /// Moment-matching Newton iteration failed to converge.
    NewtonDivergence { iterations: usize, residual: f64 },
    CflViolation { dt: f64, limit: f64 },
    NegativePressure { cell: usize, pressure: f64 },
    /// A contiguous fluid or kinetic zone is narrower than the stencil.
    ZoneTooNarrow { start: usize, len: usize },
    /// Burnett coefficients are only known for the plain BGK model.
    ModelMismatch { beta: f64 },
    AsymmetricGrid,
    InvalidGrid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateCell { cell, rho } => {
                write!(f, "degenerate cell {cell}: density {rho:e} below floor")
            }
            Error::NonPositiveTemperature(t) => write!(f, "non-positive temperature {t:e}"),
            Error::NonSpdTensor { min_eigenvalue } => {
                write!(f, "temperature tensor not SPD (min eigenvalue {min_eigenvalue:e})")
            }
            Error::NewtonDivergence { iterations, residual } => write!(
                f,
                "moment matching diverged after {iterations} iterations (residual {residual:e})"
            ),
            Error::CflViolation { dt, limit } => {
                write!(f, "time step {dt:e} exceeds stability limit {limit:e}")
            }
            Error::NegativePressure { cell, pressure } => {
                write!(f, "negative pressure {pressure:e} in cell {cell}")
            }
            Error::ZoneTooNarrow { start, len } => {
                write!(f, "zone starting at cell {start} has width {len} < 2")
            }
            Error::ModelMismatch { beta } => {
                write!(f, "Burnett indicator requires beta = 0, got {beta}")
            }
            Error::AsymmetricGrid => write!(f, "velocity grid is not symmetric under v -> -v"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
