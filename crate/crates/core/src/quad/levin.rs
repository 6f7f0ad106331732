/// Levin's u-transform of the series whose terms are `terms`.
///
/// Uses all `k + 1 = terms.len()` partial sums with remainder estimates
/// `ω_j = (j + 1) a_j`. Returns `None` when a term vanishes (the remainder
/// model breaks down) or the denominator cancels to zero.
pub fn levin_u(terms: &[f64]) -> Option<f64> {
    let n = terms.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(terms[0]);
    }
    let k = n - 1;
    let beta = 1.0;
    let last = beta + k as f64;
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    let mut partial = 0.0;
    let mut binom = 1.0;
    for (j, &a) in terms.iter().enumerate() {
        partial += a;
        if a == 0.0 || !a.is_finite() {
            return None;
        }
        let omega = (beta + j as f64) * a;
        let ratio = ((beta + j as f64) / last).powi(k as i32 - 1);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * binom * ratio / omega;
        numerator += weight * partial;
        denominator += weight;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    if denominator == 0.0 || !denominator.is_finite() {
        return None;
    }
    Some(numerator / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_harmonic_series() {
        let terms: Vec<f64> = (1..=16)
            .map(|n| if n % 2 == 1 { 1.0 / n as f64 } else { -1.0 / n as f64 })
            .collect();
        let est = levin_u(&terms).unwrap();
        assert!((est - std::f64::consts::LN_2).abs() < 1e-12, "{est}");
    }

    #[test]
    fn logarithmic_convergence() {
        // Σ 1/n² converges like 1/n; the u-transform still accelerates it, though
        // cancellation in the weights limits the attainable accuracy.
        let terms: Vec<f64> = (1..=20).map(|n| 1.0 / (n as f64 * n as f64)).collect();
        let est = levin_u(&terms).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((est - exact).abs() < 1e-6, "{est}");
    }

    #[test]
    fn geometric_series_is_exact() {
        let terms: Vec<f64> = (0..6).map(|n| 0.5f64.powi(n)).collect();
        assert!((levin_u(&terms).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_term_yields_none() {
        assert!(levin_u(&[1.0, 0.0, 0.5]).is_none());
        assert!(levin_u(&[]).is_none());
    }
}
