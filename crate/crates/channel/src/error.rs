use thiserror::Error;

/// Errors produced by model construction, evaluation, and estimation.
#[derive(Debug, Error)]
pub enum ChannelError {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A numerical routine could not reach the requested accuracy.
    /// `achieved` is the best error (or residual) the routine obtained.
    #[error("numeric failure in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    NumericFailure {
        context: String,
        achieved: f64,
        requested: f64,
    },

    /// An operation was called with a model family it does not support
    /// (e.g. a stationary-increments kernel with a sinusoidal wobble).
    #[error("model mismatch: {0}")]
    WrongModel(String),

    /// A Monte Carlo delay bin collected no samples.
    #[error("empty delay bin [{lo:.6e}, {hi:.6e}) s after {n_paths} paths (bin may lie below the line-of-sight delay)")]
    EmptyBin { lo: f64, hi: f64, n_paths: usize },

    /// A configured evaluation budget was exhausted before completion.
    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Sampling grid too coarse for the frequency range requested.
    #[error("aliasing: {0}")]
    Aliasing(String),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> ChannelError {
    ChannelError::InvalidParameter {
        name,
        message: message.into(),
    }
}
