use super::{check_finite, integrate_finite, QuadratureResult, Tolerance};
use crate::error::domain;
use crate::Result;

const MAX_CHUNKS: usize = 100_000;

/// `∫ₐ^∞ f(x) dx` for integrands with `|f(x)| ≤ C e^{-rate·x}` eventually.
///
/// The half-line is consumed in chunks of width `2/rate`. After each chunk
/// the remaining tail is bounded by `|f(x_end)| / rate`; integration stops
/// once two consecutive chunks and the tail bound are all negligible.
pub fn integrate_decaying<F>(f: F, a: f64, decay_rate: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(decay_rate > 0.0) || !decay_rate.is_finite() {
        return Err(domain("integrate_decaying", format!("decay rate must be > 0, got {decay_rate}")));
    }
    if !a.is_finite() {
        return Err(domain("integrate_decaying", format!("lower limit must be finite, got {a}")));
    }
    let width = 2.0 / decay_rate;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut quiet_chunks = 0;
    let mut lo = a;
    for _ in 0..MAX_CHUNKS {
        let hi = lo + width;
        let budget_left = tol.max_evaluations.saturating_sub(evaluations);
        if budget_left < Tolerance::MIN_EVALUATIONS {
            break;
        }
        let chunk_tol = Tolerance {
            abs_tol: 0.1 * tol.target(value).max(tol.abs_tol),
            rel_tol: tol.rel_tol,
            max_evaluations: budget_left,
        };
        let chunk = integrate_finite(&f, lo, hi, &chunk_tol)?;
        evaluations += chunk.evaluations;
        value += chunk.value;
        error += chunk.error_estimate;
        let f_end = check_finite("integrate_decaying", hi, f(hi))?;
        evaluations += 1;
        let tail = f_end.abs() / decay_rate;
        let target = tol.target(value);
        if chunk.value.abs() <= 0.25 * target && tail <= 0.25 * target {
            quiet_chunks += 1;
        } else {
            quiet_chunks = 0;
        }
        lo = hi;
        if quiet_chunks >= 2 {
            let error_estimate = error + tail;
            return Ok(QuadratureResult {
                value,
                error_estimate,
                evaluations,
                converged: error_estimate <= target,
            });
        }
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error.max(tol.target(value)) * 10.0,
        evaluations,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 1e-12, 1_000_000).unwrap()
    }

    #[test]
    fn exponential() {
        let r = integrate_decaying(|x: f64| (-x).exp(), 0.0, 1.0, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn polynomial_times_exponential() {
        let r = integrate_decaying(|x: f64| x * (-2.0 * x).exp(), 0.0, 2.0, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.25).abs() < 1e-11);
    }

    #[test]
    fn gaussian() {
        let r = integrate_decaying(|x: f64| (-x * x).exp(), 0.0, 1.0, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5 * PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn shifted_lower_limit() {
        let r = integrate_decaying(|x: f64| (-x).exp(), 3.0, 1.0, &tol()).unwrap();
        assert!((r.value - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(integrate_decaying(|x: f64| (-x).exp(), 0.0, 0.0, &tol()).is_err());
        assert!(integrate_decaying(|x: f64| (-x).exp(), 0.0, -1.0, &tol()).is_err());
    }

    #[test]
    fn non_decaying_integrand_does_not_converge() {
        let small = Tolerance::new(1e-10, 1e-10, 5_000).unwrap();
        let r = integrate_decaying(|_| 1.0, 0.0, 1.0, &small).unwrap();
        assert!(!r.converged);
    }
}
