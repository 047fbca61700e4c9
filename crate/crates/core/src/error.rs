use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("no root bracketed on the {branch} unbound branch in k' = [{lo:.6e}, {hi:.6e}] nm^-1 (box too small or too many states requested)")]
    Bracketing { branch: &'static str, lo: f64, hi: f64 },

    #[error("{what}: quadrature did not converge (estimate {value:.9e}, error bound {error:.3e})")]
    NonConvergence {
        what: &'static str,
        value: f64,
        error: f64,
    },

    #[error("time step {dt:.3e} ps does not resolve the fastest frequency; need dt < {required:.3e} ps")]
    StepTooLarge { dt: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
