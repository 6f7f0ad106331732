//! Semi-infinite integrals of oscillatory integrands, summed lobe by lobe.
//!
//! `[start, ∞)` is cut at caller-supplied breakpoints (zeros of the
//! oscillating factor), each lobe is integrated with the adaptive finite
//! engine, and the sequence of partial sums is accelerated with Levin's
//! u-transform. When lobes die out faster than the tolerance, the direct
//! partial sum is returned instead.

use super::adaptive::integrate_finite_points;
use super::{QuadratureResult, Tolerance};
use crate::error::domain;
use crate::specfun::{bessel_zero, BesselOrder};
use crate::Result;

const MAX_LOBES: usize = 4000;
const LEVIN_WINDOW: usize = 24;
const MIN_LEVIN_TERMS: usize = 5;
/// Geometric refinement levels applied to the first lobe.
const GRADING_LEVELS: i32 = 40;

/// How the lobe touching the lower limit is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstLobe {
    /// Geometrically graded panels accumulating at the lower limit, for
    /// envelopes much narrower than the lobe.
    Graded,
    /// Substitution `x = start + u²` (plus grading in `u`), for integrands
    /// with a square-root type endpoint.
    EndpointTransform,
}

fn graded_points(a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::with_capacity(GRADING_LEVELS as usize + 2);
    pts.push(a);
    for j in (0..=GRADING_LEVELS).rev() {
        let p = a + (b - a) * 2f64.powi(-j);
        if p > *pts.last().unwrap() {
            pts.push(p);
        }
    }
    pts
}

/// Levin u-transform over a window of terms whose preceding terms sum to
/// `prefix`; `first_index` is the position of `window[0]` in the full series.
fn levin_window(prefix: f64, window: &[f64], first_index: usize) -> Option<f64> {
    let k = window.len().checked_sub(1)?;
    let beta = 1.0 + first_index as f64;
    let last = beta + k as f64;
    let mut partial = prefix;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    for (j, &a) in window.iter().enumerate() {
        partial += a;
        if a == 0.0 {
            return None;
        }
        let omega = (beta + j as f64) * a;
        let ratio = ((beta + j as f64) / last).powi(k as i32 - 1);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * binom * ratio / omega;
        num += w * partial;
        den += w;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let est = num / den;
    est.is_finite().then_some(est)
}

/// `∫_{b(0)}^∞ f(x) dx` where `b(k)`, `k = 0, 1, 2, ...`, are increasing
/// breakpoints at which `f` changes sign.
pub fn integrate_lobes<F, B>(f: F, breakpoint: B, first: FirstLobe, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
    B: Fn(usize) -> f64,
{
    let lobe_tol = tol.with_tolerances(0.02 * tol.abs_tol, 0.02 * tol.rel_tol);
    let mut terms: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut lobe_error = 0.0;
    let mut evaluations = 0;
    let mut estimates: Vec<f64> = Vec::new();
    let mut best = (0.0, f64::INFINITY);

    let mut lo = breakpoint(0);
    for k in 1..=MAX_LOBES {
        let hi = breakpoint(k);
        if !(hi > lo) {
            return Err(domain("integrate_lobes", format!("breakpoints must increase: {lo} then {hi}")));
        }
        let budget_left = tol.max_evaluations.saturating_sub(evaluations);
        if budget_left < Tolerance::MIN_EVALUATIONS {
            break;
        }
        let this_tol = Tolerance {
            max_evaluations: budget_left,
            ..lobe_tol
        };
        let lobe = if k == 1 {
            match first {
                FirstLobe::Graded => integrate_finite_points(&f, &graded_points(lo, hi), &this_tol)?,
                FirstLobe::EndpointTransform => {
                    let start = lo;
                    let g = |u: f64| 2.0 * u * f(start + u * u);
                    integrate_finite_points(g, &graded_points(0.0, (hi - lo).sqrt()), &this_tol)?
                }
            }
        } else {
            super::integrate_finite(&f, lo, hi, &this_tol)?
        };
        evaluations += lobe.evaluations;
        lobe_error += lobe.error_estimate;
        sum += lobe.value;
        terms.push(lobe.value);
        lo = hi;

        // Lobes already below tolerance: the alternating tail is bounded by the last term.
        if k >= 2 {
            let target = tol.target(sum);
            let a_k = terms[k - 1].abs();
            let a_prev = terms[k - 2].abs();
            if a_k <= 0.01 * target && a_prev <= 0.01 * target {
                let error_estimate = lobe_error + a_k;
                return Ok(QuadratureResult {
                    value: sum,
                    error_estimate,
                    evaluations,
                    converged: error_estimate <= target,
                });
            }
        }

        if k >= MIN_LEVIN_TERMS {
            let start = k.saturating_sub(LEVIN_WINDOW);
            let prefix: f64 = terms[..start].iter().sum();
            match levin_window(prefix, &terms[start..], start) {
                Some(est) => estimates.push(est),
                None => estimates.clear(),
            }
            if estimates.len() >= 3 {
                let n = estimates.len();
                let spread = (estimates[n - 1] - estimates[n - 2])
                    .abs()
                    .max((estimates[n - 2] - estimates[n - 3]).abs());
                let value = estimates[n - 1];
                let error_estimate = spread + lobe_error;
                if error_estimate < best.1 {
                    best = (value, error_estimate);
                }
                if error_estimate <= tol.target(value) {
                    return Ok(QuadratureResult {
                        value,
                        error_estimate,
                        evaluations,
                        converged: true,
                    });
                }
            }
        }
    }
    let (value, error_estimate) = if best.1.is_finite() {
        best
    } else {
        (sum, lobe_error + terms.last().map_or(f64::INFINITY, |t| t.abs()))
    };
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
        converged: false,
    })
}

/// `∫₀^∞ g(w) J_order(freq·w) dw`, partitioned at the scaled zeros of
/// `J_order`.
///
/// `g` must be smooth on `(0, ∞)` and decay fast enough for the integral to
/// converge (at least `O(w^{-1/2-ε})`, given the `w^{-1/2}` Bessel envelope).
pub fn integrate_bessel_oscillatory<G>(g: G, order: BesselOrder, freq: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    G: Fn(f64) -> f64,
{
    if !(freq > 0.0) || !freq.is_finite() {
        return Err(domain("integrate_bessel_oscillatory", format!("frequency must be > 0, got {freq}")));
    }
    let f = |w: f64| {
        let envelope = g(w);
        if envelope == 0.0 {
            0.0
        } else {
            envelope * order.eval(freq * w)
        }
    };
    let breakpoint = |k: usize| if k == 0 { 0.0 } else { bessel_zero(order, k) / freq };
    integrate_lobes(f, breakpoint, FirstLobe::Graded, tol)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_finite;
    use crate::specfun::{bessel_k, RealOrder};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::new(1e-13, 1e-12, 2_000_000).unwrap()
    }

    #[test]
    fn laplace_transform_of_j0() {
        let r = integrate_bessel_oscillatory(|w: f64| (-w).exp(), BesselOrder::Zero, 1.0, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - FRAC_1_SQRT_2).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn laplace_transform_of_j1_against_truncated_oracle() {
        // Oracle: brute-force integration over [0, 200], tail < e^{-200}.
        let oracle_tol = Tolerance::new(1e-14, 1e-14, 5_000_000).unwrap();
        let oracle = integrate_finite(|w: f64| (-w).exp() * crate::specfun::j1(w), 0.0, 200.0, &oracle_tol).unwrap();
        assert!((oracle.value - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);
        let r = integrate_bessel_oscillatory(|w: f64| (-w).exp(), BesselOrder::One, 1.0, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - oracle.value).abs() < 1e-12);
    }

    #[test]
    fn algebraic_envelopes_need_acceleration() {
        // ∫₀^∞ w J₀(mw)/(w²+1)² dw = m K₁(m)/2 and ∫₀^∞ w J₀(mw)/(w²+1) dw = K₀(m).
        for &m in &[0.5, 1.0, 2.0] {
            let r = integrate_bessel_oscillatory(|w: f64| w / (w * w + 1.0).powi(2), BesselOrder::Zero, m, &tol()).unwrap();
            let want = 0.5 * m * bessel_k(RealOrder::new(1.0).unwrap(), m).unwrap();
            assert!(r.converged);
            assert!((r.value - want).abs() < 1e-11, "m={m}: {} vs {want}", r.value);

            let r = integrate_bessel_oscillatory(|w: f64| w / (w * w + 1.0), BesselOrder::Zero, m, &tol()).unwrap();
            let want = bessel_k(RealOrder::new(0.0).unwrap(), m).unwrap();
            assert!((r.value - want).abs() < 1e-10, "m={m}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn tiny_frequency_recovers_plain_integral() {
        let r = integrate_bessel_oscillatory(|w: f64| (-w).exp(), BesselOrder::Zero, 1e-4, &tol()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn rejects_bad_frequency() {
        assert!(integrate_bessel_oscillatory(|w: f64| (-w).exp(), BesselOrder::Zero, 0.0, &tol()).is_err());
    }

    #[test]
    fn endpoint_transform_first_lobe() {
        // Oscillation in sqrt(v² - 1): the first lobe has a square-root endpoint at v = 1.
        let f = |v: f64| {
            let s = (v * v - 1.0).max(0.0).sqrt();
            (-v).exp() * crate::specfun::j0(s)
        };
        let bp = |k: usize| {
            if k == 0 {
                1.0
            } else {
                let z = bessel_zero(BesselOrder::Zero, k);
                (z * z + 1.0).sqrt()
            }
        };
        let a = integrate_lobes(f, bp, FirstLobe::EndpointTransform, &tol()).unwrap();
        let b = integrate_lobes(f, bp, FirstLobe::Graded, &tol()).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.value - b.value).abs() < 1e-11);
        // ∫_1^∞ e^{-v} J₀(sqrt(v²-1)) dv = e^{-sqrt 2}/sqrt 2
        let exact = (-(2f64).sqrt()).exp() / 2f64.sqrt();
        assert!((a.value - exact).abs() < 1e-11, "{} vs {exact}", a.value);
    }
}
