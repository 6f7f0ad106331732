//! Massless-to-massive integral operators for cylinder kernels, and the two
//! diagnostics that test them: the residual of `∂²(T/t)/∂μ∂t = T/2` and a
//! Laplace-domain consistency check.

use std::cell::RefCell;

use crate::error::{domain, precondition};
use crate::kernels::{Decay, KernelProfile};
use crate::numdiff::{check_step, mixed_partial};
use crate::quad::{integrate_bessel_oscillatory, integrate_decaying, integrate_lobes, FirstLobe, QuadratureResult, Tolerance};
use crate::specfun::{bessel_zero, j1, BesselOrder};
use crate::{Error, Result};

/// Which integral representation of the transform to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformMethod {
    /// `−t ∫₀^∞ J₀(mw) ∂_v(T₀/v)|_{v=√(w²+t²)} w dw/√(w²+t²)`.
    /// Needs the profile's analytic `∂_v(T₀/v)`.
    DerivativeForm,
    /// `T₀(t) − t ∫_t^∞ m J₁(m√(v²−t²)) T₀(v) dv/√(v²−t²)`.
    BoundaryPartForm,
    /// `T₀(t) − t ∫₀^∞ m J₁(mw) T₀(√(w²+t²)) dw/√(w²+t²)`.
    #[default]
    ShiftedVariableForm,
}

impl std::str::FromStr for TransformMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivative" => Ok(TransformMethod::DerivativeForm),
            "boundary" => Ok(TransformMethod::BoundaryPartForm),
            "shifted" => Ok(TransformMethod::ShiftedVariableForm),
            _ => Err(domain("TransformMethod", format!("unknown method {s:?} (derivative|boundary|shifted)"))),
        }
    }
}

const MAX_REFINEMENTS: usize = 4;

/// `T(m², t)` from the massless profile `T(0, ·)`.
pub fn to_massive(profile: &KernelProfile, m: f64, t: f64, method: TransformMethod, tol: &Tolerance) -> Result<f64> {
    to_massive_with_error(profile, m, t, method, tol).map(|r| r.value)
}

/// As [`to_massive`], with the error estimate and evaluation count.
///
/// The integral is recomputed with tighter tolerances when cancellation
/// against `T(0, t)` leaves its error above `tol.target(T(m², t))`.
pub fn to_massive_with_error(
    profile: &KernelProfile,
    m: f64,
    t: f64,
    method: TransformMethod,
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    const OP: &str = "to_massive";
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(OP, format!("t must be finite and > 0, got {t}")));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain(OP, format!("m must be finite and >= 0, got {m}")));
    }
    if profile.decay.is_none() {
        return Err(precondition(OP, "profile carries no large-t decay metadata"));
    }
    if profile.mass_squared != 0.0 {
        return Err(precondition(OP, "profile must be massless"));
    }
    if method == TransformMethod::DerivativeForm && !profile.has_ratio_derivative() {
        return Err(precondition(OP, "derivative form needs an analytic d/dv (T/v)"));
    }
    let base = match method {
        TransformMethod::DerivativeForm => 0.0,
        _ => profile.eval(t)?,
    };
    if m == 0.0 {
        let value = match method {
            TransformMethod::DerivativeForm => profile.eval(t)?,
            _ => base,
        };
        return Ok(QuadratureResult {
            value,
            error_estimate: 0.0,
            evaluations: 1,
            converged: true,
        });
    }

    let mut itol = *tol;
    let mut evaluations = 0;
    for _ in 0..MAX_REFINEMENTS {
        let r = integral_part(profile, m, t, method, &itol)?;
        evaluations += r.evaluations;
        let value = base + r.value;
        if !r.converged {
            return Err(Error::NotConverged {
                op: OP,
                estimate: value,
                error: r.error_estimate,
            });
        }
        let target = tol.target(value);
        if r.error_estimate <= target {
            return Ok(QuadratureResult {
                value,
                error_estimate: r.error_estimate,
                evaluations,
                converged: true,
            });
        }
        let abs = 0.5 * target;
        itol = itol.with_tolerances(abs.min(itol.abs_tol), (abs / r.value.abs().max(f64::MIN_POSITIVE)).min(itol.rel_tol));
    }
    Err(Error::NotConverged {
        op: OP,
        estimate: f64::NAN,
        error: f64::NAN,
    })
}

fn integral_part(profile: &KernelProfile, m: f64, t: f64, method: TransformMethod, tol: &Tolerance) -> Result<QuadratureResult> {
    let negate = |r: QuadratureResult| QuadratureResult { value: -r.value, ..r };
    match method {
        TransformMethod::ShiftedVariableForm => {
            let g = |w: f64| {
                let r = w.hypot(t);
                m * t * profile.at(r) / r
            };
            integrate_bessel_oscillatory(g, BesselOrder::One, m, tol).map(negate)
        }
        TransformMethod::DerivativeForm => {
            let g = |w: f64| {
                let r = w.hypot(t);
                t * profile.ratio_derivative(r).unwrap_or(f64::NAN) * w / r
            };
            integrate_bessel_oscillatory(g, BesselOrder::Zero, m, tol).map(negate)
        }
        TransformMethod::BoundaryPartForm => {
            let f = |v: f64| {
                let s = ((v - t) * (v + t)).max(0.0).sqrt();
                let x = m * s;
                // m J₁(ms)/s, finite as s → 0
                let kernel = if x < 1e-8 { 0.5 * m * m } else { m * j1(x) / s };
                t * kernel * profile.at(v)
            };
            let breakpoint = |k: usize| {
                if k == 0 {
                    t
                } else {
                    t.hypot(bessel_zero(BesselOrder::One, k) / m)
                }
            };
            integrate_lobes(f, breakpoint, FirstLobe::EndpointTransform, tol).map(negate)
        }
    }
}

/// Transforms `profile = free_part + bracket` piecewise: the free part by
/// its closed form, the bracket by [`to_massive`] with the default method.
///
/// Returns `(free_result, bracket_result)`.
pub fn to_massive_subtracted(
    profile: &KernelProfile,
    free_part: &KernelProfile,
    m: f64,
    t: f64,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    const OP: &str = "to_massive_subtracted";
    let free = free_part
        .massive_closed_form(m, t)
        .ok_or_else(|| precondition(OP, "free part has no closed-form massive counterpart"))??;
    let bracket = profile.difference(free_part);
    let b = to_massive(&bracket, m, t, TransformMethod::ShiftedVariableForm, tol)?;
    Ok((free, b))
}

/// `|∂²(T/t)/∂μ∂t − T/2|` at `(μ, t)` by the four-corner mixed difference.
pub fn pde_residual<F>(t_eval: F, mu: f64, t: f64, h_mu: f64, h_t: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    const OP: &str = "pde_residual";
    check_step(OP, mu, h_mu)?;
    check_step(OP, t, h_t)?;
    if mu - h_mu < 0.0 || t - h_t <= 0.0 {
        return Err(domain(OP, format!("stencil leaves the domain at mu={mu}, t={t}")));
    }
    let err = RefCell::new(None);
    let ratio = |a: f64, b: f64| match t_eval(a, b) {
        Ok(v) => v / b,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mixed = mixed_partial(ratio, mu, t, h_mu, h_t);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let center = t_eval(mu, t)?;
    Ok((mixed - 0.5 * center).abs())
}

/// Both sides of the Laplace-domain identity
/// `∫₀^∞ e^{−sμ} T(μ,t)/t dμ = T(0,t)/(st) − (1/2s²) ∫_t^∞ e^{−(v²−t²)/4s} T(0,v) dv`.
///
/// The left side integrates transformed values over `m = √μ`; the right side
/// uses only the massless profile. Returns `(lhs, rhs)`.
pub fn laplace_consistency(profile: &KernelProfile, s: f64, t: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    const OP: &str = "laplace_consistency";
    if !(s > 0.0) || !s.is_finite() || !(t > 0.0) || !t.is_finite() {
        return Err(domain(OP, format!("s and t must be finite and > 0, got s={s}, t={t}")));
    }
    let err = RefCell::new(None);
    let lhs_integrand = |m: f64| {
        if m == 0.0 {
            return 0.0;
        }
        match to_massive(profile, m, t, TransformMethod::ShiftedVariableForm, tol) {
            Ok(v) => 2.0 * m * (-s * m * m).exp() * v / t,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    // e^{−s m²} decays at least like e^{−s m} beyond m = 1/2.
    let lhs = integrate_decaying(lhs_integrand, 0.0, s, tol)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let lhs = lhs.require_converged(OP)?.value;

    let profile_rate = match profile.decay {
        Some(Decay::Exponential(r)) => r,
        _ => 0.0,
    };
    let rate = (t / (2.0 * s) + profile_rate).max(1e-3);
    let inner = integrate_decaying(|v: f64| (-(v - t) * (v + t) / (4.0 * s)).exp() * profile.at(v), t, rate, tol)?
        .require_converged(OP)?;
    let rhs = profile.eval(t)? / (s * t) - inner.value / (2.0 * s * s);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{free_massive_cylinder, spectral_trace, Spectrum};
    use std::f64::consts::PI;

    fn tight() -> Tolerance {
        Tolerance::new(1e-15, 1e-13, 4_000_000).unwrap()
    }

    const METHODS: [TransformMethod; 3] = [
        TransformMethod::ShiftedVariableForm,
        TransformMethod::BoundaryPartForm,
        TransformMethod::DerivativeForm,
    ];

    #[test]
    fn free_line_reproduces_closed_form() {
        let p = KernelProfile::free_massless(1, 0.0).unwrap();
        let want = free_massive_cylinder(1, 0.0, 1.0, 1.0).unwrap();
        for method in METHODS {
            let v = to_massive(&p, 1.0, 1.0, method, &tight()).unwrap();
            assert!((v - want).abs() < 1e-10, "{method:?}: {v} vs {want}");
        }
    }

    #[test]
    fn zero_mass_is_identity() {
        let profiles = [
            KernelProfile::free_massless(1, 0.0).unwrap(),
            KernelProfile::free_massless(3, 0.5).unwrap(),
            KernelProfile::interval_trace(1.0).unwrap(),
            KernelProfile::halfline(1, 0.3, 0.6, 0.0).unwrap(),
        ];
        for p in &profiles {
            for &t in &[0.1, 1.0, 3.0] {
                let base = p.eval(t).unwrap();
                for method in METHODS {
                    assert_eq!(to_massive(p, 0.0, t, method, &tight()).unwrap(), base);
                    let v = to_massive(p, 1e-8, t, method, &tight()).unwrap();
                    assert!((v - base).abs() < 1e-12, "{p:?} {method:?} t={t}: {v} vs {base}");
                }
            }
        }
    }

    #[test]
    fn interval_trace_against_spectral_oracle() {
        let p = KernelProfile::interval_trace(1.0).unwrap();
        let oracle_tol = Tolerance::new(1e-16, 1e-15, 10_000_000).unwrap();
        let tol = Tolerance::new(1e-12, 1e-11, 4_000_000).unwrap();
        for &m in &[0.5, 1.0, 2.0] {
            for &t in &[0.1, 0.5, 1.0] {
                let oracle = spectral_trace(&Spectrum::dirichlet_interval(1.0, m * m).unwrap(), t, &oracle_tol).unwrap();
                let shifted = to_massive(&p, m, t, TransformMethod::ShiftedVariableForm, &tol).unwrap();
                let boundary = to_massive(&p, m, t, TransformMethod::BoundaryPartForm, &tol).unwrap();
                assert!((shifted - oracle).abs() < 1e-9, "m={m} t={t}: {shifted} vs {oracle}");
                assert!((shifted - boundary).abs() < 1e-8, "m={m} t={t}: {shifted} vs {boundary}");
            }
        }
        let v = to_massive(&p, 1.0, 0.1, TransformMethod::default(), &tol).unwrap();
        assert!((v - 2.689).abs() < 1e-3);
        let far = to_massive(&p, 1.0, 20.0, TransformMethod::default(), &tol).unwrap();
        assert!(far.abs() < 1e-8);
    }

    #[test]
    fn subtracted_transform_matches_unsplit() {
        let l = 1.0;
        let p = KernelProfile::interval_trace(l).unwrap();
        let free = KernelProfile::interval_free_part(l).unwrap();
        let tol = Tolerance::new(1e-13, 1e-12, 4_000_000).unwrap();
        let (f, b) = to_massive_subtracted(&p, &free, 1.0, 0.1, &tol).unwrap();
        let whole = to_massive(&p, 1.0, 0.1, TransformMethod::default(), &tol).unwrap();
        assert!((f + b - whole).abs() < 1e-8);
        assert!((f - l / PI * crate::specfun::bessel_k(crate::specfun::RealOrder::new(1.0).unwrap(), 0.1).unwrap()).abs() < 1e-13);

        let (f0, b0) = to_massive_subtracted(&p, &free, 0.0, 0.1, &tol).unwrap();
        assert!((f0 - l / (PI * 0.1)).abs() < 1e-13);
        assert!((b0 - (p.eval(0.1).unwrap() - l / (PI * 0.1))).abs() < 1e-13);

        let missing = KernelProfile::interval_trace(l).unwrap();
        assert!(matches!(
            to_massive_subtracted(&p, &missing, 1.0, 0.1, &tol),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn preconditions() {
        let mut p = KernelProfile::interval_trace(1.0).unwrap();
        p.decay = None;
        assert!(matches!(
            to_massive(&p, 1.0, 1.0, TransformMethod::default(), &tight()),
            Err(Error::Precondition { .. })
        ));
        let p = KernelProfile::free_massive(1, 0.0, 1.0).unwrap();
        assert!(to_massive(&p, 1.0, 1.0, TransformMethod::default(), &tight()).is_err());
        let p = KernelProfile::interval_trace_massive(1.0, 0.0, tight()).unwrap();
        assert!(to_massive(&p, 1.0, 0.0, TransformMethod::default(), &tight()).is_err());
        let no_derivative = KernelProfile::new(
            |t| (-t).exp(),
            crate::kernels::Geometry::new(1, crate::kernels::Config::FreeSpace { z: 0.0 }).unwrap(),
            0.0,
            0,
            Some(Decay::Exponential(1.0)),
        );
        assert!(matches!(
            to_massive(&no_derivative, 1.0, 1.0, TransformMethod::DerivativeForm, &tight()),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn pde_residual_of_closed_forms_and_spectral_sum() {
        let free1 = |mu: f64, t: f64| free_massive_cylinder(1, 0.0, mu.sqrt(), t);
        assert!(pde_residual(free1, 1.0, 1.0, 1e-4, 1e-4).unwrap() < 1e-6);
        let free3 = |mu: f64, t: f64| free_massive_cylinder(3, 0.0, mu.sqrt(), t);
        assert!(pde_residual(free3, 4.0, 0.5, 1e-4, 1e-4).unwrap() < 1e-5);
        let tol = Tolerance::new(1e-17, 1e-16, 10_000_000).unwrap();
        let spectral = |mu: f64, t: f64| spectral_trace(&Spectrum::dirichlet_interval(1.0, mu)?, t, &tol);
        assert!(pde_residual(spectral, 1.0, 0.5, 1e-4, 1e-4).unwrap() < 1e-5);
        // A function that does not satisfy the equation.
        let wrong = |mu: f64, t: f64| Ok((-t * (1.0 + mu)).exp());
        assert!(pde_residual(wrong, 1.0, 0.5, 1e-4, 1e-4).unwrap() > 1e-2);
        assert!(pde_residual(free1, 1.0, 1.0, 0.0, 1e-4).is_err());
        assert!(pde_residual(free1, 1.0, 1.0, 1e-20, 1e-4).is_err());
        assert!(pde_residual(free1, 1e-5, 1.0, 1e-4, 1e-4).is_err());
    }

    #[test]
    fn pde_residual_of_transformed_trace() {
        let p = KernelProfile::interval_trace(1.0).unwrap();
        let tol = Tolerance::new(1e-15, 1e-14, 4_000_000).unwrap();
        for &(mu, t) in &[(1.0, 0.5), (0.5, 0.1), (4.0, 1.0)] {
            let eval = |mu: f64, t: f64| to_massive(&p, mu.sqrt(), t, TransformMethod::default(), &tol);
            let r = pde_residual(eval, mu, t, 1e-4, 1e-4).unwrap();
            assert!(r < 1e-5, "mu={mu} t={t}: {r}");
        }
    }

    #[test]
    fn laplace_identity() {
        let tol = Tolerance::new(1e-10, 1e-9, 2_000_000).unwrap();
        let free = KernelProfile::free_massless(1, 0.0).unwrap();
        let (lhs, rhs) = laplace_consistency(&free, 1.0, 1.0, &tol).unwrap();
        assert!((lhs - rhs).abs() < 1e-5, "{lhs} vs {rhs}");
        assert!((rhs - 0.211_605_612_851_345_1).abs() < 1e-8);
        let interval = KernelProfile::interval_trace(1.0).unwrap();
        let (lhs, rhs) = laplace_consistency(&interval, 2.0, 0.5, &tol).unwrap();
        assert!((lhs - rhs).abs() < 1e-5, "{lhs} vs {rhs}");
        let (_, rhs) = laplace_consistency(&interval, 1.0, 20.0, &tol).unwrap();
        assert!(rhs.abs() < 1e-8);
    }
}
