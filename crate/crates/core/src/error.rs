use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A required input or structural precondition is missing.
    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    /// The integrand or kernel returned a non-finite value.
    #[error("non-finite evaluation in {op} at x = {at}")]
    Evaluation { op: &'static str, at: f64 },

    /// An iterative procedure ran out of budget before meeting its tolerance.
    #[error("{op} did not converge: best estimate {estimate:e}, error estimate {error:e}")]
    NotConverged {
        op: &'static str,
        estimate: f64,
        error: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}

pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Precondition {
        op,
        detail: detail.into(),
    }
}
