//! Modified Bessel function of the second kind, `K_ν(x)`, for real `ν ≥ 0`.
//!
//! The order is split as `ν = μ + n` with `|μ| ≤ 1/2`. `K_μ` and `K_{μ+1}`
//! come from Temme's series when `x < 2` and from Steed's continued fraction
//! (CF2) otherwise; forward recurrence in the order, which is stable for
//! `K`, then reaches `K_ν`.

use super::gamma::temme_gammas;
use crate::error::domain;
use crate::Result;
use std::f64::consts::PI;

const TEMME_LIMIT: f64 = 2.0;
const EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;

/// A validated Bessel order: finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealOrder(f64);

impl RealOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(domain("RealOrder", format!("order must be finite and >= 0, got {nu}")));
        }
        Ok(RealOrder(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A `K_ν` value with its underflow flag.
///
/// When the true value is below the smallest normal `f64`, `value` is 0 and
/// `underflow` is set; the tails of rapidly converging `K₁` sums hit this
/// legitimately, so it is not treated as an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KValue {
    pub value: f64,
    pub underflow: bool,
}

/// `K_ν(x)` with the underflow flag exposed.
pub fn bessel_k_checked(nu: RealOrder, x: f64) -> Result<KValue> {
    let scaled = bessel_k_scaled(nu, x)?;
    // log-space check avoids computing e^{-x} when it already underflows.
    let log_value = scaled.ln() - x;
    if log_value < f64::MIN_POSITIVE.ln() {
        return Ok(KValue {
            value: 0.0,
            underflow: true,
        });
    }
    Ok(KValue {
        value: scaled * (-x).exp(),
        underflow: false,
    })
}

/// `K_ν(x)`; returns 0 where the result underflows.
pub fn bessel_k(nu: RealOrder, x: f64) -> Result<f64> {
    bessel_k_checked(nu, x).map(|k| k.value)
}

/// The exponentially scaled function `e^x K_ν(x)`.
pub fn bessel_k_scaled(nu: RealOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", format!("argument must be finite and > 0, got {x}")));
    }
    let nu = nu.value();
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut k_mu, mut k_next) = if x < TEMME_LIMIT {
        let (a, b) = temme(mu, x);
        let scale = x.exp();
        (a * scale, b * scale)
    } else {
        steed_scaled(mu, x)
    };
    let two_over_x = 2.0 / x;
    let mut i = 1.0;
    while i <= steps {
        let k_up = (mu + i) * two_over_x * k_next + k_mu;
        k_mu = k_next;
        k_next = k_up;
        i += 1.0;
    }
    if !k_mu.is_finite() {
        return Err(domain("bessel_k", format!("K_{nu}({x}) overflows f64")));
    }
    Ok(k_mu)
}

/// Temme's series: `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`, `0 < x < 2`.
fn temme(mu: f64, x: f64) -> (f64, f64) {
    let half_x = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
    let d = -half_x.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let e = e.exp();
    let mut p = 0.5 * e / gampl;
    let mut q = 0.5 / (e * gammi);
    let mut c = 1.0;
    let d = half_x * half_x;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= d / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// Steed's CF2 evaluation of `(e^x K_μ(x), e^x K_{μ+1}(x))` for `x ≥ 2`.
fn steed_scaled(mu: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let k_next = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k(nu: f64, x: f64) -> f64 {
        bessel_k(RealOrder::new(nu).unwrap(), x).unwrap()
    }

    // 20-digit values from an arbitrary-precision evaluation.
    const REFERENCE: [(f64, f64, f64); 21] = [
        (0.5, 1e-6, 1253.312_884_001_989_620_9),
        (0.5, 20.0, 5.776_373_974_707_444_652_8e-10),
        (1.0, 1e-6, 999_999.999_992_784_324_22),
        (1.0, 0.5, 1.656_441_120_003_300_893_7),
        (1.0, 1.0, 0.601_907_230_197_234_574_74),
        (1.0, 2.0, 0.139_865_881_816_522_427_28),
        (1.0, 5.0, 0.004_044_613_445_452_164_208_4),
        (1.0, 100.0, 4.679_853_735_636_909_286_6e-45),
        (1.0, 600.0, 1.356_957_918_112_806_086_9e-262),
        (1.5, 0.5, 3.225_142_810_499_760_716_2),
        (1.5, 5.0, 0.004_531_936_049_571_459_071_4),
        (2.0, 1e-6, 1_999_999_999_999.500_181),
        (2.0, 1.0, 1.624_838_898_635_177_482_8),
        (2.0, 2.0, 0.253_759_754_566_055_862_94),
        (2.0, 20.0, 6.329_543_612_292_228_110_5e-10),
        (2.5, 2.0, 0.389_797_758_896_199_703_95),
        (3.0, 0.5, 62.057_909_529_930_256_386),
        (3.0, 100.0, 4.869_862_747_792_454_894_7e-45),
        (6.0, 1e-6, 3.839_999_999_999_809_042_6e39),
        (6.0, 1.0, 3653.838_311_859_469_851_1),
        (6.0, 5.0, 0.080_671_613_234_564_294_335),
    ];

    #[test]
    fn matches_reference_values() {
        for (nu, x, want) in REFERENCE {
            let got = k(nu, x);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn half_integer_closed_form() {
        for &x in &[0.5, 1.0, 2.0] {
            let want = (PI / (2.0 * x)).sqrt() * (-x as f64).exp();
            assert_relative_eq!(k(0.5, x), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn order_recurrence() {
        for &nu in &[0.5, 1.0, 1.5, 2.0] {
            for &x in &[0.5, 1.0, 5.0, 20.0] {
                let lhs = k(nu + 1.0, x);
                let rhs = k((nu - 1.0).abs(), x) + 2.0 * nu / x * k(nu, x); // K_{-ν} = K_ν
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        for &x in &[50.0, 200.0, 600.0] {
            let leading = (PI / (2.0 * x)).sqrt() * (-x as f64).exp() * (1.0 + 3.0 / (8.0 * x));
            let ratio = k(1.0, x) / leading;
            assert!((ratio - 1.0).abs() < 1.0 / (x * x), "x = {x}: ratio {ratio}");
        }
    }

    #[test]
    fn underflow_is_flagged_not_fatal() {
        let r = bessel_k_checked(RealOrder::new(1.0).unwrap(), 800.0).unwrap();
        assert!(r.underflow);
        assert_eq!(r.value, 0.0);
        let r = bessel_k_checked(RealOrder::new(1.0).unwrap(), 600.0).unwrap();
        assert!(!r.underflow);
        assert!(r.value > 0.0);
        // the scaled form stays representable
        let s = bessel_k_scaled(RealOrder::new(1.0).unwrap(), 800.0).unwrap();
        assert_relative_eq!(s, (PI / 1600.0).sqrt() * (1.0 + 3.0 / 6400.0), max_relative = 1e-5);
    }

    #[test]
    fn domain_errors() {
        let one = RealOrder::new(1.0).unwrap();
        assert!(bessel_k(one, 0.0).is_err());
        assert!(bessel_k(one, -1.0).is_err());
        assert!(bessel_k(one, f64::NAN).is_err());
        assert!(RealOrder::new(-0.5).is_err());
        assert!(RealOrder::new(f64::INFINITY).is_err());
    }

    #[test]
    fn integral_representation_oracle() {
        // K_1(2) = ∫₀^∞ e^{-2 cosh u} cosh u du, by composite Simpson on [0, 6].
        let f = |u: f64| (-2.0 * u.cosh()).exp() * u.cosh();
        let n = 20_000;
        let h = 6.0 / n as f64;
        let mut s = f(0.0) + f(6.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        assert_relative_eq!(k(1.0, 2.0), oracle, max_relative = 1e-12);
        assert!((k(1.0, 2.0) - 0.139_865_881_8).abs() < 1e-10);
    }

    proptest::proptest! {
        #[test]
        fn positive_everywhere(nu in 0.0f64..6.0, x in 1e-6f64..700.0) {
            let v = bessel_k_checked(RealOrder::new(nu).unwrap(), x).unwrap();
            proptest::prop_assert!(v.value > 0.0 || v.underflow);
        }
    }
}
