//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by filter construction, loss evaluation, solvers and training.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: bad lengths, out-of-range parameters, non-finite data.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A pole has modulus >= 1, so the recurrence is unstable.
    #[error("unstable pole: |a[{index}]| = {modulus} >= 1")]
    Stability { index: usize, modulus: f64 },

    /// Poles coincide (or collide with an augmented pole), so the Cauchy
    /// machinery degenerates.
    #[error("degenerate pole configuration: {0}")]
    DegenerateConfiguration(String),

    /// The autocorrelated closed form divides by `a_s - rho` and `a_s`; a pole
    /// too close to either makes it meaningless. Use the frequency-domain
    /// quadrature instead.
    #[error(
        "singular configuration for the closed-form autocorrelated loss: {0}; \
         evaluate loss_freq_quadrature instead"
    )]
    SingularConfiguration(String),

    /// The Gram matrix is too ill-conditioned to solve reliably.
    #[error("ill-conditioned Gram matrix: condition estimate {estimate:.3e} > {limit:.1e}")]
    Conditioning { estimate: f64, limit: f64 },

    /// A value that must be real (up to rounding) came out with a large
    /// imaginary residue, or a computation produced a non-finite number.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Asked for a value outside the formula's domain (window boundary,
    /// tangent branch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Training blew up.
    #[error("training diverged at epoch {epoch}: mse = {mse:.3e}")]
    Divergence { epoch: usize, mse: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
