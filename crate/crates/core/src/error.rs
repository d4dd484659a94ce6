use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} = {value:e} is outside the domain {domain}")]
    Domain { quantity: &'static str, value: f64, domain: String },

    #[error(
        "quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64, subdivisions: usize },

    #[error("ODE integration failed near t = {t:e} s ({accepted} accepted / {rejected} rejected steps): {message}")]
    Integration { t: f64, accepted: u32, rejected: u32, message: String },

    #[error("non-finite phase for particle {particle} at step {step} (t = {t:e} s)")]
    NonFinite { particle: usize, step: usize, t: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
