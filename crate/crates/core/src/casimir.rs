//! Vacuum energy of a massive scalar field on a Dirichlet interval.
//!
//! The regularized energy `−½ ∂_t Tr T(m², t)` splits into
//!
//! - the bag divergences `L/(2πt²)` and `−(m²L/4π) ln(mt/2) − (2C+1) m²L/8π`,
//! - the massless Casimir energy `−π/24L`,
//! - the boundary constant `−m/4`,
//! - the mass-dependent Casimir energy, by an oscillatory integral or a
//!   `K₁` sum.

use std::f64::consts::PI;

use crate::error::domain;
use crate::kernels::interval_mass_correction;
use crate::numdiff::{central_difference5, extrapolate_to_zero, loglog_slope};
use crate::quad::{integrate_bessel_oscillatory, Tolerance};
use crate::specfun::{bessel_k_checked, BesselOrder, RealOrder, EULER_GAMMA};
use crate::{Error, Result};

/// Below this `mL` the sum needs too many terms and the integral is used.
pub const SWITCHOVER_ML: f64 = 0.2;
/// Largest number of `K₁` terms the sum may use.
pub const MAX_SUM_TERMS: usize = 1_000_000;
/// The logarithm convention of `divergent_log_coeff` and `divergent_const`.
pub const LOG_SCALE_CONVENTION: &str = "ln(m t / 2)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassCasimirMethod {
    Integral,
    Sum,
}

impl MassCasimirMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MassCasimirMethod::Integral => "integral",
            MassCasimirMethod::Sum => "sum",
        }
    }
}

/// The four-term decomposition of the interval's regularized energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub m: f64,
    pub length: f64,
    /// Coefficient of `1/t²`.
    pub divergent_t2_coeff: f64,
    /// Coefficient of `ln(mt/2)`.
    pub divergent_log_coeff: f64,
    pub divergent_const: f64,
    pub log_scale_convention: &'static str,
    pub massless_casimir: f64,
    pub boundary_constant: f64,
    pub mass_casimir: f64,
    pub mass_casimir_method: MassCasimirMethod,
    pub total_renormalized: f64,
    /// `massless_casimir + mass_casimir`, the `L`-dependent part.
    pub force_relevant: f64,
}

fn check_length(op: &'static str, length: f64) -> Result<()> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("L must be finite and > 0, got {length}")))
    }
}

fn check_mass(op: &'static str, m: f64) -> Result<()> {
    if m >= 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("m must be finite and >= 0, got {m}")))
    }
}

/// `−π/(24L)`.
pub fn massless_casimir_energy(length: f64) -> Result<f64> {
    check_length("massless_casimir_energy", length)?;
    Ok(-PI / (24.0 * length))
}

/// `1/(e^y − 1) − 1/y`, accurate near `y = 0`.
fn bose_minus_pole(y: f64) -> f64 {
    if y < 0.05 {
        let y2 = y * y;
        -0.5 + y * (1.0 / 12.0 - y2 * (1.0 / 720.0 - y2 * (1.0 / 30240.0 - y2 / 1_209_600.0)))
    } else {
        1.0 / y.exp_m1() - 1.0 / y
    }
}

/// Massless Casimir energy read off the expansion of the interval trace:
/// the coefficient `c` of `t` in `Tr T(0,t) = L/(πt) − 1/2 + c t + O(t³)`,
/// found by extrapolation, gives `−c/2`.
pub fn massless_casimir_from_trace(length: f64) -> Result<f64> {
    check_length("massless_casimir_from_trace", length)?;
    let a = PI / length;
    let ts: Vec<f64> = (0..6).map(|k| 0.5 * length * 0.5f64.powi(k)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| (bose_minus_pole(a * t) + 0.5) / t).collect();
    let t2 = |t: f64| t * t;
    let t4 = |t: f64| t.powi(4);
    let t6 = |t: f64| t.powi(6);
    let c = extrapolate_to_zero(&ts, &vals, &[&t2, &t4, &t6])?;
    Ok(-0.5 * c.value)
}

/// `−m/4`. Independent of `L`, so it exerts no force.
pub fn boundary_interaction_energy(m: f64) -> Result<f64> {
    check_mass("boundary_interaction_energy", m)?;
    Ok(0.0 - 0.25 * m)
}

/// `−¼ ∂_t (1 − e^{−mt})` at `t`, by finite differences; tends to `−m/4`.
pub fn boundary_energy_at(m: f64, t: f64) -> Result<f64> {
    check_mass("boundary_energy_at", m)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("boundary_energy_at", format!("t must be finite and > 0, got {t}")));
    }
    Ok(-0.25 * central_difference5(|s| -(-m * s).exp_m1(), t, 0.01 * t))
}

// 2 B_{2n} / (2n)!: coth(u/2) − 2/u = Σ c_n u^{2n−1}.
const COTH_SERIES: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 360.0,
    1.0 / 15120.0,
    -1.0 / 604800.0,
    1.0 / 23950080.0,
    -691.0 / 653837184000.0,
    1.0 / 37362124800.0,
    -3617.0 / 5335311421440000.0,
    1.717_212_411_255_568_9e-14,
    -4.349_737_397_116_123_7e-16,
];

/// `coth(u/2) − 2/u` without cancellation at small `u`.
fn coth_bracket(u: f64) -> f64 {
    if u < 1.0 {
        let u2 = u * u;
        u * COTH_SERIES.iter().rev().fold(0.0, |acc, &c| acc * u2 + c)
    } else {
        1.0 + 2.0 / u.exp_m1() - 2.0 / u
    }
}

/// `(m/4) ∫₀^∞ J₁(mLu/π) [coth(u/2) − 2/u] du/u`.
pub fn mass_casimir_integral(m: f64, length: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "mass_casimir_integral";
    check_mass(OP, m)?;
    check_length(OP, length)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let g = |u: f64| if u == 0.0 { 0.0 } else { 0.25 * m * coth_bracket(u) / u };
    let r = integrate_bessel_oscillatory(g, BesselOrder::One, m * length / PI, tol)?;
    Ok(r.require_converged(OP)?.value)
}

/// `Σ_{s≥1} K₁(2mLs)/s`, stopped by the tail bound
/// `K₁(x_{N+1})/(N+1) · 1/(1 − e^{−2mL})` (valid because `K₁(x)eˣ` decreases).
fn k1_sum(op: &'static str, m: f64, length: f64, tol: &Tolerance, scale: f64) -> Result<f64> {
    let x = 2.0 * m * length;
    let k1 = RealOrder::new(1.0)?;
    let geometric = 1.0 / -(-x).exp_m1();
    let mut sum = 0.0;
    for s in 1..=MAX_SUM_TERMS {
        let kv = bessel_k_checked(k1, x * s as f64)?;
        sum += kv.value / s as f64;
        let next = bessel_k_checked(k1, x * (s + 1) as f64)?.value / (s + 1) as f64;
        let tail = scale * next * geometric;
        if kv.underflow || tail <= tol.target(scale * sum) {
            return Ok(sum);
        }
    }
    Err(Error::NotConverged {
        op,
        estimate: sum,
        error: f64::NAN,
    })
}

/// `π/(24L) − (m/2π) Σ_{s≥1} K₁(2mLs)/s`.
pub fn mass_casimir_sum(m: f64, length: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "mass_casimir_sum";
    check_mass(OP, m)?;
    check_length(OP, length)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let scale = m / (2.0 * PI);
    Ok(PI / (24.0 * length) - scale * k1_sum(OP, m, length, tol, scale)?)
}

/// Mass-dependent Casimir energy by the representation suited to `mL`.
pub fn mass_casimir(m: f64, length: f64, tol: &Tolerance) -> Result<(f64, MassCasimirMethod)> {
    if m * length >= SWITCHOVER_ML {
        Ok((mass_casimir_sum(m, length, tol)?, MassCasimirMethod::Sum))
    } else {
        Ok((mass_casimir_integral(m, length, tol)?, MassCasimirMethod::Integral))
    }
}

/// `−π/(24L) + mass_casimir`, which is `−(m/2π) Σ K₁(2mLs)/s`.
pub fn force_relevant_energy(m: f64, length: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "force_relevant_energy";
    check_mass(OP, m)?;
    check_length(OP, length)?;
    if m == 0.0 {
        return massless_casimir_energy(length);
    }
    if m * length >= SWITCHOVER_ML {
        let scale = m / (2.0 * PI);
        Ok(-scale * k1_sum(OP, m, length, tol, scale)?)
    } else {
        Ok(massless_casimir_energy(length)? + mass_casimir_integral(m, length, tol)?)
    }
}

/// All four terms for mass `m` on an interval of length `length`.
pub fn energy_breakdown(m: f64, length: f64, tol: &Tolerance) -> Result<EnergyBreakdown> {
    const OP: &str = "energy_breakdown";
    check_mass(OP, m)?;
    check_length(OP, length)?;
    let m2l = m * m * length;
    let massless = massless_casimir_energy(length)?;
    let boundary = boundary_interaction_energy(m)?;
    let (mass_part, method) = if m == 0.0 {
        (0.0, MassCasimirMethod::Sum)
    } else {
        mass_casimir(m, length, tol)?
    };
    let force_relevant = if m == 0.0 {
        massless
    } else {
        force_relevant_energy(m, length, tol)?
    };
    Ok(EnergyBreakdown {
        m,
        length,
        divergent_t2_coeff: length / (2.0 * PI),
        divergent_log_coeff: -m2l / (4.0 * PI),
        divergent_const: -(2.0 * EULER_GAMMA + 1.0) * m2l / (8.0 * PI),
        log_scale_convention: LOG_SCALE_CONVENTION,
        massless_casimir: massless,
        boundary_constant: boundary,
        mass_casimir: mass_part,
        mass_casimir_method: method,
        total_renormalized: massless + boundary + mass_part,
        force_relevant,
    })
}

/// `K₁(x) − 1/x`, by its ascending series for `x < 2`.
fn k1_minus_pole(x: f64) -> Result<f64> {
    if x >= 2.0 {
        return Ok(bessel_k_checked(RealOrder::new(1.0)?, x)?.value - 1.0 / x);
    }
    // K₁(x) = 1/x + ln(x/2) I₁(x) − (x/4) Σ_k [ψ(k+1) + ψ(k+2)] (x²/4)^k / (k!(k+1)!)
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x²/4)^k / (k!(k+1)!)
    let mut psi1 = -EULER_GAMMA; // ψ(k+1)
    let mut i1 = 0.0;
    let mut rest = 0.0;
    for k in 0..40 {
        let psi2 = psi1 + 1.0 / (k as f64 + 1.0);
        i1 += term;
        rest += (psi1 + psi2) * term;
        psi1 = psi2;
        term *= q / ((k as f64 + 1.0) * (k as f64 + 2.0));
        if term < 1e-18 * i1 {
            break;
        }
    }
    Ok(0.5 * x * (0.5 * x).ln() * i1 - 0.25 * x * rest)
}

/// Extrapolated finite part of the regularized energy with its raw
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedEnergyReport {
    /// Extrapolated `t → 0` limit of the finite part.
    pub value: f64,
    pub error_estimate: f64,
    /// `(t, finite part at t)` for each `t` in the input sequence.
    pub sequence: Vec<(f64, f64)>,
    /// Fitted order `p` of `|X(t) − X(0)| ~ t^p`, where `X` is the
    /// contribution of the even-reflection part of the trace (massless plus
    /// mass-dependent Casimir energy). `None` at `m = 0` or when the
    /// deviations sit at the rounding floor.
    pub casimir_order: Option<f64>,
}

/// `t_k = 0.1 L 2^{−k}`, `k = 0..6`.
pub fn default_t_sequence(length: f64) -> Vec<f64> {
    (0..7).map(|k| 0.1 * length * 0.5f64.powi(k)).collect()
}

/// Rebuilds the renormalized energy from the spectral trace.
///
/// At each `t` the finite part `−½ ∂_t Tr T − L/(2πt²) + (m²L/4π) ln(mt/2)
/// + (2C+1) m²L/8π` is computed by a five-point difference (step `t/100`)
/// of the trace with its divergent terms removed first, then extrapolated
/// to `t = 0` over the basis `t, t², t² ln t, t³, t³ ln t`.
pub fn regularized_energy_check(m: f64, length: f64, t_sequence: &[f64], tol: &Tolerance) -> Result<RegularizedEnergyReport> {
    const OP: &str = "regularized_energy_check";
    check_mass(OP, m)?;
    check_length(OP, length)?;
    if t_sequence.len() < 7 {
        return Err(domain(OP, format!("need at least 7 values of t, got {}", t_sequence.len())));
    }
    if t_sequence.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || t_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain(OP, "t sequence must be positive and strictly decreasing"));
    }
    let a = PI / length;
    let mu = m * m;
    let sum_tol = tol.with_tolerances(1e-18, 1e-17).capped(10 * MAX_SUM_TERMS);
    let log_const = (2.0 * EULER_GAMMA - 1.0) * mu * length / (4.0 * PI);

    // Tr T minus L/(πt) + (m²Lt/2π) ln(mt/2) + (2C−1) m²Lt/4π.
    let subtracted_trace = |t: f64| -> Result<f64> {
        let mut r = bose_minus_pole(a * t);
        if m > 0.0 {
            r += interval_mass_correction(length, mu, t, &sum_tol)?;
            r -= mu * length * t / (2.0 * PI) * (0.5 * m * t).ln() + log_const * t;
        }
        Ok(r)
    };
    // Tr T minus the free trace L(m/π)K₁(mt) and the boundary term −e^{−mt}/2.
    let even_part = |t: f64| -> Result<f64> {
        let mut r = bose_minus_pole(a * t) + 0.5;
        r += interval_mass_correction(length, mu, t, &sum_tol)?;
        r -= length * m / PI * k1_minus_pole(m * t)?;
        r += 0.5 * (-m * t).exp_m1();
        Ok(r)
    };
    let derivative = |f: &dyn Fn(f64) -> Result<f64>, t: f64| -> Result<f64> {
        let h = 0.01 * t;
        let v = [f(t - 2.0 * h)?, f(t - h)?, f(t + h)?, f(t + 2.0 * h)?];
        Ok((v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h))
    };

    let mut finite = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        finite.push(-0.5 * derivative(&subtracted_trace, t)?);
    }
    let b1 = |t: f64| t;
    let b2 = |t: f64| t * t;
    let b2l = |t: f64| t * t * t.ln();
    let b3 = |t: f64| t * t * t;
    let b3l = |t: f64| t * t * t * t.ln();
    let ext = extrapolate_to_zero(t_sequence, &finite, &[&b1, &b2l, &b2, &b3l, &b3]).map_err(|_| Error::NotConverged {
        op: OP,
        estimate: *finite.last().unwrap(),
        error: f64::NAN,
    })?;
    if !ext.value.is_finite() {
        return Err(Error::NotConverged {
            op: OP,
            estimate: *finite.last().unwrap(),
            error: f64::NAN,
        });
    }

    let casimir_order = if m > 0.0 {
        let limit = massless_casimir_energy(length)? + mass_casimir(m, length, tol)?.0;
        let mut dev = Vec::with_capacity(t_sequence.len());
        for &t in t_sequence {
            dev.push(-0.5 * derivative(&even_part, t)? - limit);
        }
        let floor = 1e-10 * limit.abs().max(1.0);
        if dev.iter().all(|d| d.abs() > floor) {
            loglog_slope(t_sequence, &dev)
        } else {
            None
        }
    } else {
        None
    };

    Ok(RegularizedEnergyReport {
        value: ext.value,
        error_estimate: ext.error_estimate,
        sequence: t_sequence.iter().copied().zip(finite).collect(),
        casimir_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    const EMC_1_1: f64 = 0.107_567_801_379_763_7;
    const TOTAL_1_1: f64 = -0.273_331_892_519_811;

    fn tol() -> Tolerance {
        Tolerance::new(1e-13, 1e-12, 4_000_000).unwrap()
    }

    fn k1(x: f64) -> f64 {
        bessel_k(RealOrder::new(1.0).unwrap(), x).unwrap()
    }

    #[test]
    fn massless_energy() {
        assert!((massless_casimir_energy(1.0).unwrap() + 0.1308996939).abs() < 1e-10);
        assert!((massless_casimir_energy(2.0).unwrap() + 0.0654498469).abs() < 1e-10);
        assert!(massless_casimir_energy(0.0).is_err());
        for &l in &[0.5, 1.0, 2.0] {
            let e = massless_casimir_from_trace(l).unwrap();
            assert!((e + PI / (24.0 * l)).abs() < 1e-10, "L={l}: {e}");
        }
    }

    #[test]
    fn boundary_energy() {
        assert_eq!(boundary_interaction_energy(1.0).unwrap(), -0.25);
        assert_eq!(boundary_interaction_energy(0.0).unwrap(), 0.0);
        assert!(boundary_interaction_energy(-1.0).is_err());
        for &m in &[0.1, 1.0, 3.0] {
            assert!((boundary_energy_at(m, 1e-6).unwrap() + 0.25 * m).abs() < 1e-6 * m);
        }
    }

    #[test]
    fn coth_bracket_is_continuous() {
        for &u in &[1e-3f64, 0.3, 0.999_999_9] {
            let direct = 1.0 / (0.5 * u).tanh() - 2.0 / u;
            assert!((coth_bracket(u) - direct).abs() < 1e-12 * direct.abs().max(1e-3) / u.min(1.0), "{u}");
        }
        let below = coth_bracket(1.0 - 1e-12);
        let above = coth_bracket(1.0 + 1e-12);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn k1_series_matches_bessel_k() {
        for &x in &[0.01, 0.3, 1.0, 1.9] {
            let want = k1(x) - 1.0 / x;
            assert!((k1_minus_pole(x).unwrap() - want).abs() < 1e-13 * (1.0 / x), "{x}");
        }
    }

    #[test]
    fn sum_and_integral_agree() {
        let s = mass_casimir_sum(1.0, 1.0, &tol()).unwrap();
        assert!((s - EMC_1_1).abs() < 1e-13);
        let first_terms = PI / 24.0 - (k1(2.0) + k1(4.0) / 2.0) / (2.0 * PI);
        assert!((s - first_terms).abs() < 1e-3);
        for &ml in &[0.3, 0.5, 1.0, 2.0, 5.0] {
            let i = mass_casimir_integral(ml, 1.0, &tol()).unwrap();
            let s = mass_casimir_sum(ml, 1.0, &tol()).unwrap();
            assert!((i - s).abs() < 1e-10, "mL={ml}: {i} vs {s}");
        }
        // Small mL: m/4 + O(m² ln m); reference from direct high-precision quadrature.
        let small = mass_casimir_integral(1e-4, 1.0, &tol()).unwrap();
        assert!((small - 2.499_126_955_418_516e-5).abs() < 1e-14, "{small}");
    }

    #[test]
    fn sum_gives_up_at_tiny_mass() {
        assert!(matches!(
            mass_casimir_sum(1e-9, 1.0, &tol()),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn breakdown_values() {
        let b = energy_breakdown(1.0, 1.0, &tol()).unwrap();
        assert_eq!(b.divergent_t2_coeff, 0.5 / PI);
        assert_eq!(b.boundary_constant, -0.25);
        assert!((b.divergent_log_coeff + 0.25 / PI).abs() < 1e-16);
        assert!((b.divergent_const + (2.0 * EULER_GAMMA + 1.0) / (8.0 * PI)).abs() < 1e-16);
        assert!((b.mass_casimir - EMC_1_1).abs() < 1e-12);
        assert!((b.total_renormalized - TOTAL_1_1).abs() < 1e-12);
        assert!((b.force_relevant + 0.0233318).abs() < 1e-7);
        assert_eq!(b.mass_casimir_method, MassCasimirMethod::Sum);

        let b0 = energy_breakdown(0.0, 1.0, &tol()).unwrap();
        assert_eq!(b0.divergent_log_coeff, 0.0);
        assert_eq!(b0.divergent_const, 0.0);
        assert_eq!(b0.boundary_constant, 0.0);
        assert_eq!(b0.mass_casimir, 0.0);
        assert_eq!(b0.total_renormalized, -PI / 24.0);

        let small = energy_breakdown(0.01, 1.0, &tol()).unwrap();
        assert_eq!(small.mass_casimir_method, MassCasimirMethod::Integral);
    }

    #[test]
    fn large_mass_suppression() {
        for &ml in &[2.0, 3.0, 5.0] {
            let f = force_relevant_energy(ml, 1.0, &tol()).unwrap();
            assert!(f.abs() <= ml / (2.0 * PI) * k1(2.0 * ml) * 1.1);
        }
        assert_eq!(force_relevant_energy(1e9, 1.0, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn scaling_in_ml() {
        for &ml in &[0.1, 0.7, 3.0] {
            let a = mass_casimir(ml, 1.0, &tol()).unwrap().0;
            for &l in &[0.5, 2.0, 4.0] {
                let b = l * mass_casimir(ml / l, l, &tol()).unwrap().0;
                assert!((a - b).abs() < 1e-9, "mL={ml} L={l}");
            }
        }
    }

    #[test]
    fn small_mass_continuity() {
        let e3 = energy_breakdown(1e-3, 1.0, &tol()).unwrap().total_renormalized + PI / 24.0;
        let e4 = energy_breakdown(1e-4, 1.0, &tol()).unwrap().total_renormalized + PI / 24.0;
        assert!(e4.abs() < e3.abs());
        // The boundary −m/4 cancels against the m/4 in the mass part; what remains is O(m² ln m).
        for (e, m) in [(e3, 1e-3f64), (e4, 1e-4)] {
            assert!(e.abs() < m * m * (1.0 + m.ln().abs()), "{e}");
        }
    }

    #[test]
    fn regularized_energy_reconstruction() {
        let ts = default_t_sequence(1.0);
        let r0 = regularized_energy_check(0.0, 1.0, &ts, &tol()).unwrap();
        assert!((r0.value + PI / 24.0).abs() < 1e-6, "{}", r0.value);
        let r = regularized_energy_check(1.0, 1.0, &ts, &tol()).unwrap();
        assert!((r.value - TOTAL_1_1).abs() < 1e-5, "{}", r.value);
        let order = r.casimir_order.unwrap();
        assert!(order >= 1.9, "{order}");
        assert!(regularized_energy_check(1.0, 1.0, &ts[..5], &tol()).is_err());
        let mut rev = ts.clone();
        rev.reverse();
        assert!(regularized_energy_check(1.0, 1.0, &rev, &tol()).is_err());
    }
}
