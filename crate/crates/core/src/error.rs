use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument violates the precondition of the operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The waveform has no spread (maximum == minimum), so it cannot be normalized.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Piecewise extrema could not pick a branch.
    #[error("branch selection failed for zeta = {zeta}, alpha = {alpha}")]
    BranchSelection { zeta: f64, alpha: f64 },

    /// The phase became non-finite during time stepping.
    #[error("integration failed: non-finite phase at tau = {tau}")]
    IntegrationFailure { tau: f64 },

    /// Doubling search never left the zero-voltage region.
    #[error("no running state found for |i_dc| up to {limit}")]
    BracketNotFound { limit: f64 },

    /// Photon-coefficient truncation did not reach the requested tail mass.
    #[error("photon coefficients did not converge: tail mass {tail_mass:e} at n_max = {n_max}")]
    Convergence { n_max: usize, tail_mass: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
