use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::polynomial::{MuPolynomial, Scalar};
use crate::numdiff::check_step;
use crate::specfun::gamma_fn;
use crate::Result;

/// `b_s(μ) = Σ_{k ≤ s/2} (−μ)^k/k! · b_{s−2k}(0)` for `s = 0..b0.len()`.
///
/// The heat kernel factorizes as `K(μ,t) = K(0,t) e^{−μt}`; the expansion
/// runs in `t^{(−d+s)/2}`, so each power of `t` shifts `s` by two. The shift
/// is the same in every dimension.
pub fn heat_coeffs_massive<F: Scalar>(b0: &[F], mu: &F) -> Vec<F> {
    heat_coeffs_massive_poly(b0).iter().map(|p| p.eval(mu)).collect()
}

/// As [`heat_coeffs_massive`], keeping `μ` symbolic.
pub fn heat_coeffs_massive_poly<F: Scalar>(b0: &[F]) -> Vec<MuPolynomial<F>> {
    (0..b0.len())
        .map(|s| {
            let mut coeffs = Vec::with_capacity(s / 2 + 1);
            let mut factor = F::one(); // (−1)^k / k!
            for k in 0..=s / 2 {
                if k > 0 {
                    factor = -factor / F::from_i64(k as i64);
                }
                coeffs.push(factor.clone() * b0[s - 2 * k].clone());
            }
            MuPolynomial::new(coeffs)
        })
        .collect()
}

/// `|∂K/∂μ + tK|` at `(μ, t)` by a central difference of step `h` in `μ`.
pub fn heat_pde_residual<K>(k_eval: K, mu: f64, t: f64, h: f64) -> Result<f64>
where
    K: Fn(f64, f64) -> Result<f64>,
{
    check_step("heat_pde_residual", mu, h)?;
    let d = (k_eval(mu + h, t)? - k_eval(mu - h, t)?) / (2.0 * h);
    Ok((d + t * k_eval(mu, t)?).abs())
}

/// Cylinder coefficients fixed by heat coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFromHeat {
    /// `e_s` for `s ≤ d` or `s − d` even.
    pub e: BTreeMap<usize, MuPolynomial<f64>>,
    /// `f_s` for `s − d` odd, `s > d`.
    pub f: BTreeMap<usize, MuPolynomial<f64>>,
}

/// Maps heat coefficients `b_s(μ)` to the cylinder coefficients they
/// determine, through the subordination of `e^{−t√H}` to `e^{−τH}`:
///
/// - `e_s = π^{−1/2} 2^{d−s} Γ((1+d−s)/2) b_s` when `(1+d−s)/2` is not a
///   pole of `Γ`,
/// - `f_s = (−1)^{k+1} b_s / (√π k! 4^k)`, `k = (s−d−1)/2`, at the poles.
///
/// The `e_s` at the poles (among them `e_{d+1}`) are not fixed by local data.
pub fn heat_to_cylinder(b: &[MuPolynomial<f64>], d: u32) -> Result<CylinderFromHeat> {
    let d = d as i64;
    let mut e = BTreeMap::new();
    let mut f = BTreeMap::new();
    for (s, bs) in b.iter().enumerate() {
        let j = s as i64 - d; // power is t^{j}
        if j >= 1 && j % 2 == 1 {
            let k = (j - 1) / 2;
            let factorial: f64 = (1..=k).map(|i| i as f64).product();
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            f.insert(s, bs.scale(&(sign / (PI.sqrt() * factorial * 4f64.powi(k as i32)))));
        } else {
            let arg = 0.5 * (1 - j) as f64;
            let g = if arg > 0.0 {
                gamma_fn(arg)?
            } else {
                // Γ(a) = Γ(a + n) / (a (a+1) ... (a+n−1)) for negative half-integers.
                let n = (-arg).ceil() as i32 + 1;
                let mut denom = 1.0;
                for i in 0..n {
                    denom *= arg + i as f64;
                }
                gamma_fn(arg + n as f64)? / denom
            };
            e.insert(s, bs.scale(&(g * 2f64.powi(-j as i32) / PI.sqrt())));
        }
    }
    Ok(CylinderFromHeat { e, f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::polynomial::rational;
    use num_rational::BigRational;

    #[test]
    fn low_orders() {
        let b0: Vec<f64> = vec![2.0, 3.0, 5.0, 7.0];
        let b = heat_coeffs_massive(&b0, &0.5);
        assert_eq!(b[0], 2.0);
        assert_eq!(b[1], 3.0);
        assert_eq!(b[2], 5.0 - 0.5 * 2.0);
        assert_eq!(b[3], 7.0 - 0.5 * 3.0);
    }

    #[test]
    fn exact_series_product() {
        // Oracle: multiply Σ b_s τ^s by Σ (−μ)^k τ^{2k}/k! as dense polynomials in τ = √t.
        let b0: Vec<BigRational> = (0..=6).map(|s| rational(3 * s as i64 - 7, s as i64 + 2)).collect();
        let mu = rational(5, 3);
        let mut exp_series = vec![rational(0, 1); 7];
        let mut term = rational(1, 1);
        for k in 0..=3 {
            if k > 0 {
                term = -term * mu.clone() / rational(k, 1);
            }
            exp_series[2 * k as usize] = term.clone();
        }
        let mut product = vec![rational(0, 1); 7];
        for (i, a) in b0.iter().enumerate() {
            for (j, c) in exp_series.iter().enumerate() {
                if i + j <= 6 {
                    product[i + j] = product[i + j].clone() + a.clone() * c.clone();
                }
            }
        }
        assert_eq!(heat_coeffs_massive(&b0, &mu), product);
    }

    #[test]
    fn free_line_reconstruction() {
        // K(0,t) = L/√(4πt): only b_0 nonzero; b_{2k}(μ) = (−μ)^k/k! · b_0.
        let l = 2.0;
        let b00 = l / (4.0 * PI).sqrt();
        let mut b0 = vec![0.0; 5];
        b0[0] = b00;
        let mu = 1.3;
        let b = heat_coeffs_massive(&b0, &mu);
        for &t in &[1e-2f64, 1e-3] {
            let exact = b00 / t.sqrt() * (-mu * t).exp();
            let three_terms = b[0] / t.sqrt() + b[2] * t.sqrt() + b[4] * t.powf(1.5);
            let lead = -b00 * mu.powi(3) / 6.0 * t.powf(2.5);
            assert!(((exact - three_terms) / lead - 1.0).abs() < 0.05, "t={t}");
        }
    }

    #[test]
    fn pde_residuals() {
        let free = |mu: f64, t: f64| Ok((-mu * t).exp() / (4.0 * PI * t).sqrt());
        assert!(heat_pde_residual(free, 1.0, 1.0, 1e-4).unwrap() < 1e-8);
        let g = |mu: f64, t: f64| Ok((1.0 + t * t).ln() * (-mu * t).exp());
        let r1 = heat_pde_residual(g, 0.7, 0.9, 1e-2).unwrap();
        let r2 = heat_pde_residual(g, 0.7, 0.9, 5e-3).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.05);
        let interval = |mu: f64, t: f64| {
            Ok((1..200).map(|n| (-t * ((n as f64 * PI).powi(2) + mu)).exp()).sum::<f64>())
        };
        assert!(heat_pde_residual(interval, 1.0, 0.5, 1e-4).unwrap() < 1e-7);
        assert!(heat_pde_residual(free, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interval_cylinder_coefficients_from_heat() {
        let l = 1.5;
        let mut b0 = vec![0.0; 6];
        b0[0] = l / (4.0 * PI).sqrt();
        b0[1] = -0.5;
        let b = heat_coeffs_massive_poly(&b0);
        let c = heat_to_cylinder(&b, 1).unwrap();
        assert!((c.e[&0].coeff(0) - l / PI).abs() < 1e-15);
        assert!((c.e[&1].coeff(0) + 0.5).abs() < 1e-15);
        assert!((c.f[&2].coeff(1) - l / (2.0 * PI)).abs() < 1e-15);
        assert!((c.e[&3].coeff(1) + 0.25).abs() < 1e-15);
        assert!((c.f[&4].coeff(2) - l / (16.0 * PI)).abs() < 1e-15);
        assert!(!c.e.contains_key(&2));
    }
}
