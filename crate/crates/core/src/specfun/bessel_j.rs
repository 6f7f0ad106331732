//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Three regimes:
//!
//! - `|x| < 6`: the power series, whose largest term stays below ~30 so
//!   cancellation costs at most two digits.
//! - `6 ≤ |x| < 25`: the trapezoidal rule applied to Bessel's integral
//!   `J_n(x) = (1/π) ∫₀^π cos(nθ - x sin θ) dθ`. The integrand is periodic and
//!   analytic, so the rule converges geometrically once the node count
//!   exceeds `x`.
//! - `|x| ≥ 25`: Hankel's asymptotic expansion, truncated at its smallest
//!   term (below 1e-17 for `x ≥ 25`).

use crate::error::domain;
use crate::Result;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const SERIES_LIMIT: f64 = 6.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `J₀(x)`. Rejects non-finite input.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel_j0", format!("non-finite argument {x}")));
    }
    Ok(j0(x))
}

/// `J₁(x)`. Rejects non-finite input.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel_j1", format!("non-finite argument {x}")));
    }
    Ok(j1(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        series(0, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        trapezoid(0, ax)
    } else {
        hankel(0, ax)
    }
}

pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        series(1, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        trapezoid(1, ax)
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn series(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, scale) = if n == 0 { (1.0, 1.0) } else { (1.0, 0.5 * x) };
    let mut sum = term;
    let nf = f64::from(n);
    for k in 1..60 {
        let kf = f64::from(k);
        term *= q / (kf * (kf + nf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    scale * sum
}

pub(super) fn trapezoid(n: u32, x: f64) -> f64 {
    let panels = x.ceil() as usize + 12;
    let h = PI / panels as f64;
    let nf = f64::from(n);
    let f = |theta: f64| (nf * theta - x * theta.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for j in 1..panels {
        sum += f(j as f64 * h);
    }
    sum / panels as f64
}

pub(super) fn hankel(n: u32, x: f64) -> f64 {
    let four_n2 = 4.0 * f64::from(n * n);
    let eight_x = 8.0 * x;
    // a_k / x^k built incrementally: a_k = a_{k-1} (4n² - (2k-1)²) / (k · 8).
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..64 {
        let odd = f64::from(2 * k - 1);
        let next = term * (four_n2 - odd * odd) / (f64::from(k) * eight_x);
        if next.abs() >= last {
            break;
        }
        last = next.abs();
        term = next;
        // Signs: P takes a_0 - a_2 + a_4 ..., Q takes a_1 - a_3 + ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if last < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // χ = x - (n/2 + 1/4)π
    let (cos_chi, sin_chi) = if n == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
