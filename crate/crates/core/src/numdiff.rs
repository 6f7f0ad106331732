//! Finite differences, limit extrapolation and log-log fits.

use crate::error::domain;
use crate::Result;

/// Second-order central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Fourth-order five-point central difference with step `h`.
pub fn central_difference5<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// `∂²f/∂x∂y` from the four corners of the `(2hx) × (2hy)` rectangle.
pub fn mixed_partial<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)) / (4.0 * hx * hy)
}

pub(crate) fn check_step(op: &'static str, at: f64, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() || at + h == at || at - h == at {
        return Err(domain(op, format!("step {h} underflows relative to {at}")));
    }
    Ok(())
}

/// Result of extrapolating a sequence to `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Difference between the fits through the smallest-`t` window and the
    /// window shifted by one point.
    pub error_estimate: f64,
}

/// Generalized Richardson extrapolation.
///
/// Models `values[k] ≈ L + Σ_j c_j basis_j(ts[k])` and solves for `L`
/// exactly through the `basis.len() + 1` points of smallest `t`. Needs one
/// extra point for the error estimate.
pub fn extrapolate_to_zero(ts: &[f64], values: &[f64], basis: &[&dyn Fn(f64) -> f64]) -> Result<Extrapolation> {
    let unknowns = basis.len() + 1;
    if ts.len() != values.len() {
        return Err(domain("extrapolate_to_zero", "ts and values differ in length"));
    }
    if ts.len() < unknowns + 1 {
        return Err(domain(
            "extrapolate_to_zero",
            format!("need at least {} points for {} basis functions", unknowns + 1, basis.len()),
        ));
    }
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let fit = |window: &[usize]| -> Result<f64> {
        let rows: Vec<Vec<f64>> = window
            .iter()
            .map(|&i| {
                let mut row = vec![1.0];
                row.extend(basis.iter().map(|g| g(ts[i])));
                row
            })
            .collect();
        let rhs: Vec<f64> = window.iter().map(|&i| values[i]).collect();
        solve_dense(rows, rhs)
            .map(|x| x[0])
            .ok_or_else(|| domain("extrapolate_to_zero", "singular extrapolation system"))
    };
    let value = fit(&order[..unknowns])?;
    let shifted = fit(&order[1..=unknowns])?;
    Ok(Extrapolation {
        value,
        error_estimate: (value - shifted).abs(),
    })
}

/// Gaussian elimination with column scaling and partial pivoting.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scales: Vec<f64> = (0..n)
        .map(|j| a.iter().map(|row| row[j].abs()).fold(0.0, f64::max))
        .collect();
    if scales.iter().any(|&s| s == 0.0) {
        return None;
    }
    for row in a.iter_mut() {
        for (v, s) in row.iter_mut().zip(&scales) {
            *v /= s;
        }
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let s: f64 = (col + 1..n).map(|k| a[col][k] * x[k]).sum();
        x[col] = (b[col] - s) / a[col][col];
    }
    Some(x.iter().zip(&scales).map(|(v, s)| v / s).collect())
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y != 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
