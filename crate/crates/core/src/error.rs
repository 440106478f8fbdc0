use thiserror::Error;

/// Everything that can go wrong while loading graphs or running the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: weight {weight} is not strictly positive")]
    Weight { line: usize, weight: f64 },

    #[error("vertex index {index} out of range for n = {n}")]
    Index { index: usize, n: usize },

    #[error("edge ({u}, {v}) has no matching reverse entry")]
    Asymmetry { u: usize, v: usize },

    #[error("vertex {0} is isolated (zero degree)")]
    IsolatedVertex(usize),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("operation not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("sample budget exceeded: {needed:.3e} units requested, cap is {cap}")]
    Budget { needed: f64, cap: u64 },

    #[error("vector is not in the image of the Laplacian (residual {residual:.3e})")]
    NotInImage { residual: f64 },

    #[error("graph has {n} vertices, dense routines accept at most {max}")]
    Size { n: usize, max: usize },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    Convergence { sweeps: usize },

    #[error("graph has {n} vertices, at least 4 are required")]
    TooSmall { n: usize },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
