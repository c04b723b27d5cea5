use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    /// A nonlinear or linear solve did not converge. `history` holds the
    /// residual norm of every iteration.
    #[error("solver failed to converge: {message} (residuals: {history:?})")]
    Solver { message: String, history: Vec<f64> },

    #[error("stability bound violated: dt = {dt:e} exceeds {bound:e}")]
    Stability { dt: f64, bound: f64 },

    #[error("non-finite value at step {step} (t = {time}, node {node})")]
    BlowUp { step: u64, time: f64, node: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
