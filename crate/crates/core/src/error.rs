use nalgebra::DMatrix;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge on a {}x{} matrix", .matrix.nrows(), .matrix.ncols())]
    Eigensolver { matrix: DMatrix<f64> },

    #[error("step size underflow at theta = {theta}")]
    StepUnderflow { theta: f64 },

    #[error("step budget of {max_steps} exhausted at theta = {theta}")]
    StepBudget { theta: f64, max_steps: usize },

    #[error("quadrature did not reach tolerance {tol:e}; achieved error estimate {estimate:e}")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("index counts changed between K = {k_coarse} and K = {k_fine}: ({coarse:?}) vs ({fine:?})")]
    IndexNotConverged {
        k_coarse: usize,
        k_fine: usize,
        coarse: (usize, usize),
        fine: (usize, usize),
    },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl Error {
    /// True for failures of a numerical kernel, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::Unsupported(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
