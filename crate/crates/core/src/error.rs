use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: String, reason: String },

    #[error("{what} is not normalized (norm = {norm})")]
    Unnormalized { what: String, norm: f64 },

    #[error("dimension cap exceeded: required {required}, available {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("marginal order ({k1},{k2}) exceeds particle numbers ({n1},{n2})")]
    OrderExceedsParticles { k1: usize, k2: usize, n1: usize, n2: usize },

    #[error("non-finite value encountered at t = {t}: {context}")]
    NonFinite { t: f64, context: String },

    #[error("krylov propagation failed to converge: {0}")]
    Krylov(String),

    #[error("inequality `{name}` violated: lhs = {lhs:e}, rhs = {rhs:e}, slack = {slack:e}")]
    Violation {
        name: String,
        lhs: f64,
        rhs: f64,
        slack: f64,
    },

    #[error("symmetry precondition violated: residual {residual:e}")]
    Symmetry { residual: f64 },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
