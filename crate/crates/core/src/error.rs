use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exhaustive search would exceed the configured subset budget.
    #[error("subset budget exceeded: C({n},{k}) = {subsets} > {budget}")]
    SubsetBudget {
        n: usize,
        k: usize,
        subsets: u128,
        budget: u128,
    },

    /// A generated sequence left the finite f64 range.
    #[error("float overflow: at most {max_feasible_n} points are representable for c = {c}")]
    FloatOverflow { c: f64, max_feasible_n: usize },

    /// A clusterer was driven outside its contract (wrong stream length, etc).
    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent report: {0}")]
    InconsistentReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
