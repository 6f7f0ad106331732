use super::{j0, j1, BesselOrder};
use std::f64::consts::PI;

/// The `k`-th positive zero (`k ≥ 1`) of `J₀` or `J₁`.
///
/// McMahon's expansion supplies the starting point; Newton's method on the
/// Bessel function itself polishes it to full precision.
pub fn bessel_zero(order: BesselOrder, k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    let nu = f64::from(order.as_u32());
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let m = 4.0 * nu * nu;
    let mut x = beta - (m - 1.0) / (8.0 * beta) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * beta).powi(3));
    for _ in 0..50 {
        let (f, df) = match order {
            BesselOrder::Zero => (j0(x), -j1(x)),
            BesselOrder::One => {
                let v = j1(x);
                (v, j0(x) - v / x)
            }
        };
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    x
}

/// First `n` positive zeros of `J₁`, increasing. `n = 0` yields an empty list.
pub fn j1_zeros(n: usize) -> Vec<f64> {
    (1..=n).map(|k| bessel_zero(BesselOrder::One, k)).collect()
}

/// First `n` positive zeros of `J₀`, increasing.
pub fn j0_zeros(n: usize) -> Vec<f64> {
    (1..=n).map(|k| bessel_zero(BesselOrder::Zero, k)).collect()
}
