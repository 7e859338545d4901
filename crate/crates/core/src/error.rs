use thiserror::Error;

/// Errors raised while constructing or combining kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `|sin(ωT)|` fell inside the excluded band around a caustic.
    #[error("caustic: omega={omega}, duration={duration}, |sin(omega*duration)|={sin_abs:e} below {band:e}")]
    Caustic {
        omega: f64,
        duration: f64,
        sin_abs: f64,
        band: f64,
    },

    /// The slice step cannot be represented on the grid by the chosen slice rule.
    #[error("discretization error ({rule}): spacing^2/(2 eps) = {ratio:.6} violates bound {relation} {bound:.6}")]
    Nyquist {
        rule: &'static str,
        ratio: f64,
        relation: &'static str,
        bound: f64,
    },

    /// A Gaussian integral does not converge or collapses without a recognizable delta.
    #[error("degenerate composition: {0}")]
    Degenerate(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl CoreError {
    /// True for failures of the numerics (caustics, aliasing, degeneracy) as
    /// opposed to malformed inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            CoreError::Caustic { .. } | CoreError::Nyquist { .. } | CoreError::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CoreError::Domain(msg.into()))
}
