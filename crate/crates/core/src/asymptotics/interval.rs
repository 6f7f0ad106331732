//! Expansion data for the Dirichlet interval trace in one dimension.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::cylinder::{InitialData, Renormalized};
use crate::casimir::{boundary_interaction_energy, mass_casimir, massless_casimir_energy};
use crate::error::domain;
use crate::quad::Tolerance;
use crate::specfun::EULER_GAMMA;
use crate::Result;

fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut binom = BigRational::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += &binom * bk;
            binom = binom * BigRational::from_integer((m + 1 - k).into()) / BigRational::from_integer((k + 1).into());
        }
        b.push(-acc / BigRational::from_integer((m + 1).into()));
    }
    b
}

/// Massless data through order `n`: from
/// `1/expm1(x) = 1/x − 1/2 + Σ B_{2j} x^{2j−1}/(2j)!` with `x = πt/L`.
pub fn interval_initial_data(length: f64, n: usize) -> Result<InitialData<f64>> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(domain("interval_initial_data", format!("length must be > 0, got {length}")));
    }
    let b = bernoulli(n);
    let a = PI / length;
    let mut e = BTreeMap::new();
    let mut f = BTreeMap::new();
    let mut fact = 1.0;
    for s in 0..=n {
        if s > 0 {
            fact *= s as f64;
        }
        let v = match s {
            0 => 1.0 / a,
            1 => -0.5,
            _ if s % 2 == 1 => 0.0,
            _ => b[s].to_f64().unwrap() / fact * a.powi(s as i32 - 1),
        };
        e.insert(s, v);
        if s >= 2 && s % 2 == 0 {
            f.insert(s, 0.0);
        }
    }
    Ok(InitialData { e, f })
}

/// `e_2(μ)` from the renormalized energy, tabulated on `mus` (which must
/// start at 0 and increase):
/// `e_2 = (μL/2π) ln(√μ/2) + (2C−1) μL/4π − 2 E_total(√μ, L)`.
pub fn interval_renormalized_table(length: f64, mus: &[f64], tol: &Tolerance) -> Result<Renormalized<f64>> {
    let mut pts = Vec::with_capacity(mus.len());
    for &mu in mus {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(domain("interval_renormalized_table", format!("mu must be >= 0, got {mu}")));
        }
        let m = mu.sqrt();
        let total = massless_casimir_energy(length)? + boundary_interaction_energy(m)? + mass_casimir(m, length, tol)?.0;
        let log_part = if mu == 0.0 {
            0.0
        } else {
            mu * length / (2.0 * PI) * (0.5 * m).ln()
        };
        pts.push((mu, log_part + (2.0 * EULER_GAMMA - 1.0) * mu * length / (4.0 * PI) - 2.0 * total));
    }
    Renormalized::tabulated(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::cylinder::{expansion_fit_check, solve_cylinder_recursion};
    use crate::asymptotics::polynomial::rational;
    use crate::kernels::{dirichlet_interval_trace, dirichlet_interval_trace_massless};

    fn tol() -> Tolerance {
        Tolerance::new(1e-14, 1e-13, 2_000_000).unwrap()
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(8);
        assert_eq!(b[1], rational(-1, 2));
        assert_eq!(b[2], rational(1, 6));
        assert_eq!(b[3], rational(0, 1));
        assert_eq!(b[4], rational(-1, 30));
        assert_eq!(b[8], rational(-1, 30));
    }

    #[test]
    fn massless_data_reproduces_trace() {
        let l = 1.3;
        let data = interval_initial_data(l, 9).unwrap();
        let t: f64 = 0.05;
        let series: f64 = data.e.iter().map(|(s, e)| e * t.powi(*s as i32 - 1)).sum();
        let exact = dirichlet_interval_trace_massless(l, t).unwrap();
        assert!((series - exact).abs() < 1e-16 * 1e3 + t.powi(10), "{series} vs {exact}");
        assert!((data.e[&2] - PI / (12.0 * l)).abs() < 1e-15);
    }

    #[test]
    fn renormalized_table_starts_at_massless_value() {
        let l = 1.0;
        let Renormalized::Tabulated(s) = interval_renormalized_table(l, &[0.0, 0.5, 1.0], &tol()).unwrap() else {
            panic!()
        };
        assert!((s.eval(0.0).unwrap() - PI / 12.0).abs() < 1e-15);
        assert!(interval_renormalized_table(l, &[0.1, 0.5, 1.0], &tol()).is_err());
    }

    #[test]
    fn massive_expansion_fits_trace() {
        let l = 1.0;
        let mu = 1.0;
        let mus: Vec<f64> = (0..=80).map(|k| k as f64 / 40.0).collect();
        let e2 = interval_renormalized_table(l, &mus, &tol()).unwrap();
        for order in [2usize, 3, 5] {
            let exp = solve_cylinder_recursion(&interval_initial_data(l, order).unwrap(), 1, e2.clone(), order).unwrap();
            if order >= 2 {
                let f2 = exp.f(2).unwrap().eval(mu, exp.renormalized()).unwrap();
                assert!((f2 - mu * l / (2.0 * PI)).abs() < 1e-15);
            }
            if order >= 3 {
                assert!((exp.e(3).unwrap().eval(mu, exp.renormalized()).unwrap() + mu / 4.0).abs() < 1e-15);
            }
            let grid: Vec<f64> = (0..6).map(|k| 0.05 * 0.6f64.powi(k)).collect();
            let trace = |t: f64| dirichlet_interval_trace(l, mu, t, &tol());
            let r = expansion_fit_check(trace, &exp, mu, &grid).unwrap();
            assert!(r.passed, "order {order}: {r:?}");
            assert!((r.empirical_order.unwrap() - r.expected_order).abs() < 0.2, "order {order}: {r:?}");
        }
    }
}
