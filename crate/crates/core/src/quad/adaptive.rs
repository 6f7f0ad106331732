//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use super::{check_finite, QuadratureResult, Tolerance};
use crate::error::domain;
use crate::Result;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check_finite("integrate_finite", center, f(center))?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = check_finite("integrate_finite", x1, f(x1))?;
        let f2 = check_finite("integrate_finite", x2, f(x2))?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    // Rounding floor: a panel cannot be more accurate than its summation.
    let floor = 2.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(floor);
    Ok(Panel { a, b, value, error })
}

/// `∫ₐᵇ f(x) dx` by adaptive bisection of the panel with the largest
/// Kronrod–Gauss discrepancy.
///
/// Integrable endpoint singularities are tolerated (nodes never touch the
/// endpoints), though [`integrate_endpoint_singular`] converges much faster
/// on them.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_finite_points(f, &[a, b], tol)
}

/// Like [`integrate_finite`], but starts from the panels delimited by the
/// strictly increasing `points` (at least two). Useful when the integrand
/// has structure on scales much smaller than the interval.
pub fn integrate_finite_points<F>(f: F, points: &[f64], tol: &Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if points.len() < 2 {
        return Err(domain("integrate_finite", "need at least two points"));
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(domain(
                "integrate_finite",
                format!("interval endpoints must be finite and increasing, got [{}, {}]", w[0], w[1]),
            ));
        }
    }
    let mut heap = BinaryHeap::with_capacity(64);
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1])?);
        evaluations += EVALS_PER_PANEL;
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut converged = error <= tol.target(value);
    let mut bisections = 0usize;
    while !converged {
        if evaluations + 2 * EVALS_PER_PANEL > tol.max_evaluations {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Panel too narrow to split further.
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        evaluations += 2 * EVALS_PER_PANEL;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        bisections += 1;
        if bisections % 64 == 0 {
            (value, error) = totals(&heap);
        }
        converged = error <= tol.target(value);
        if converged {
            // confirm against freshly summed totals
            (value, error) = totals(&heap);
            converged = error <= tol.target(value);
        }
    }
    let (value, error) = totals(&heap);
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= tol.target(value),
    })
}

/// Which endpoint of `[a, b]` carries an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Left,
    Right,
    Both,
}

/// `∫ₐᵇ f(x) dx` for `f` with an integrable singularity at the flagged
/// endpoint(s), via `x = a + u²` (or `x = b - u²`).
///
/// The substitution removes `(x - a)^{-1/2}` singularities entirely and
/// softens weaker ones.
pub fn integrate_endpoint_singular<F>(f: F, a: f64, b: f64, at: Endpoint, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(domain("integrate_endpoint_singular", format!("need a < b, got [{a}, {b}]")));
    }
    match at {
        Endpoint::Left => {
            let g = |u: f64| 2.0 * u * f(a + u * u);
            integrate_finite(g, 0.0, (b - a).sqrt(), tol)
        }
        Endpoint::Right => {
            let g = |u: f64| 2.0 * u * f(b - u * u);
            integrate_finite(g, 0.0, (b - a).sqrt(), tol)
        }
        Endpoint::Both => {
            let mid = 0.5 * (a + b);
            let half_tol = tol.with_tolerances(0.5 * tol.abs_tol, tol.rel_tol);
            let span = (mid - a).sqrt();
            let left = integrate_finite(|u: f64| 2.0 * u * f(a + u * u), 0.0, span, &half_tol)?;
            let right = integrate_finite(|u: f64| 2.0 * u * f(b - u * u), 0.0, span, &half_tol)?;
            let value = left.value + right.value;
            let error_estimate = left.error_estimate + right.error_estimate;
            Ok(QuadratureResult {
                value,
                error_estimate,
                evaluations: left.evaluations + right.evaluations,
                converged: error_estimate <= tol.target(value),
            })
        }
    }
}
