//! Integration engines.
//!
//! All engines return a [`QuadratureResult`]. Exhausting the evaluation
//! budget is not an error: the result comes back with `converged == false`
//! and the best estimate so far. A non-finite integrand value is an error.

mod adaptive;
mod decaying;
mod levin;
mod oscillatory;

pub use adaptive::{integrate_endpoint_singular, integrate_finite, integrate_finite_points, Endpoint};
pub use decaying::integrate_decaying;
pub use levin::levin_u;
pub use oscillatory::{integrate_bessel_oscillatory, integrate_lobes, FirstLobe};

use crate::error::domain;
use crate::Result;

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turns a non-converged result into [`crate::Error::NotConverged`].
    pub fn require_converged(self, op: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(crate::Error::NotConverged {
                op,
                estimate: self.value,
                error: self.error_estimate,
            })
        }
    }
}

/// Accuracy request shared by every engine.
///
/// A result counts as converged when its error estimate is at most
/// `max(abs_tol, rel_tol · |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Tolerance {
    pub const MIN_EVALUATIONS: usize = 100;

    pub fn new(abs_tol: f64, rel_tol: f64, max_evaluations: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(domain(
                "Tolerance",
                format!("tolerances must be positive, got abs {abs_tol}, rel {rel_tol}"),
            ));
        }
        if max_evaluations < Self::MIN_EVALUATIONS {
            return Err(domain(
                "Tolerance",
                format!("max_evaluations must be >= {}, got {max_evaluations}", Self::MIN_EVALUATIONS),
            ));
        }
        Ok(Tolerance {
            abs_tol,
            rel_tol,
            max_evaluations,
        })
    }

    /// Same budget, different accuracy.
    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Self {
        Tolerance {
            abs_tol,
            rel_tol,
            ..self
        }
    }

    /// Same tolerances with the evaluation budget capped at `cap`.
    pub fn capped(self, cap: usize) -> Self {
        Tolerance {
            max_evaluations: self.max_evaluations.min(cap.max(Self::MIN_EVALUATIONS)),
            ..self
        }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_evaluations: 2_000_000,
        }
    }
}

pub(crate) fn check_finite(op: &'static str, x: f64, fx: f64) -> Result<f64> {
    if fx.is_finite() {
        Ok(fx)
    } else {
        Err(crate::Error::Evaluation { op, at: x })
    }
}
