use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} is outside the domain: {reason}")]
    Domain { value: f64, reason: String },

    #[error("tau = {tau} is outside the tabulated range [-{tau_max}, {tau_max}]")]
    OutOfRange { tau: f64, tau_max: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("pointer is unstable: gamma0 = {gamma0} is not below V''(0)/4 = {bound}")]
    Stability { gamma0: f64, bound: f64 },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    /// True for failures of the numerical machinery (quadrature, root
    /// finding, correlator range) as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. } | Error::Quadrature { .. } | Error::NonConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
