use thiserror::Error;

use crate::integrate::TerminalEvent;
use crate::inversion::Profile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violates a required inequality. The message
    /// names the inequality.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Picard iteration failed to contract after {halvings} halvings of eps (last eps = {last_eps:e})")]
    NoContraction { halvings: u32, last_eps: f64 },

    /// Continuation stopped before `r_max`. The partial profile up to the
    /// terminal event is kept for diagnostics.
    #[error("continuation failed at r = {radius:e}: {event}")]
    ContinuationFailed {
        event: TerminalEvent,
        radius: f64,
        partial: Box<Profile>,
    },

    #[error("insufficient range for limit estimation: {0}")]
    InsufficientRange(String),

    #[error("bad bracket: {0}")]
    BadBracket(String),

    #[error("range error: {0}")]
    Range(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
