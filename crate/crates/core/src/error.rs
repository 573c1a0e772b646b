use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the model pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Configuration rejected; every violation is listed.
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    /// An adaptive quadrature failed to reach the requested tolerance.
    #[error("{context}: quadrature reached relative error {achieved:.3e}, required {required:.3e}")]
    Quadrature {
        context: String,
        achieved: f64,
        required: f64,
    },

    /// Kernel tabulation failed its self-check against direct evaluation.
    #[error("kappa kernel accuracy check failed: rel error {rel_err:.3e} at kappa = {kappa:.6e} rad/m (limit {limit:.1e})")]
    KernelAccuracy { kappa: f64, rel_err: f64, limit: f64 },

    /// Unsupported constellation order.
    #[error("unsupported constellation order {0}: must be a square power of four in 4..=4096")]
    UnsupportedFormat(usize),

    /// Operation invoked with a mode it does not support.
    #[error("invalid mode for operation: {0}")]
    InvalidMode(String),

    /// Argument outside the operation's domain.
    #[error("{0}")]
    Domain(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
