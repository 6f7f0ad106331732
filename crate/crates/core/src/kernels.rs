//! Cylinder kernels: free space, the Dirichlet interval trace, image sums and
//! direct spectral sums.
//!
//! `μ` is stored as the mass squared everywhere; `m = √μ` is derived when a
//! formula needs it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::domain;
use crate::quad::Tolerance;
use crate::specfun::{bessel_k, gamma_fn, RealOrder};
use crate::Result;

/// Spatial configuration of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Config {
    /// Unbounded space; `z = |x − y|`.
    FreeSpace { z: f64 },
    /// Interval of length `length` with Dirichlet ends (traces only).
    DirichletInterval { length: f64 },
    /// Half-line `x > 0` with a Dirichlet wall at the origin.
    HalfLineDirichlet { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    dimension: u32,
    config: Config,
}

impl Geometry {
    pub fn new(dimension: u32, config: Config) -> Result<Self> {
        if dimension == 0 {
            return Err(domain("Geometry", "dimension must be >= 1"));
        }
        match config {
            Config::FreeSpace { z } => check_nonneg("Geometry", "z", z)?,
            Config::DirichletInterval { length } => check_positive("Geometry", "L", length)?,
            Config::HalfLineDirichlet { x, y } => {
                check_nonneg("Geometry", "x", x)?;
                check_nonneg("Geometry", "y", y)?;
            }
        }
        Ok(Geometry { dimension, config })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn config(&self) -> Config {
        self.config
    }
}

/// Large-`t` behaviour of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Bounded by `C·e^{−rate·t}`.
    Exponential(f64),
    /// Bounded by `C·t^{power}` with `power < 0`.
    Algebraic(f64),
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type MassiveEval = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A kernel as a function of `t` together with what is known about it.
#[derive(Clone)]
pub struct KernelProfile {
    evaluator: Eval,
    ratio_derivative: Option<Eval>,
    massive: Option<MassiveEval>,
    /// Leading small-`t` power of the kernel.
    pub singularity_order: i32,
    pub decay: Option<Decay>,
    pub closed_form: bool,
    pub geometry: Geometry,
    pub mass_squared: f64,
}

impl fmt::Debug for KernelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelProfile")
            .field("singularity_order", &self.singularity_order)
            .field("decay", &self.decay)
            .field("closed_form", &self.closed_form)
            .field("geometry", &self.geometry)
            .field("mass_squared", &self.mass_squared)
            .field("ratio_derivative", &self.ratio_derivative.is_some())
            .field("massive_closed_form", &self.massive.is_some())
            .finish()
    }
}

impl KernelProfile {
    /// Wraps an arbitrary evaluator. `evaluator` must be finite for `t > 0`.
    pub fn new<F>(evaluator: F, geometry: Geometry, mass_squared: f64, singularity_order: i32, decay: Option<Decay>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        KernelProfile {
            evaluator: Arc::new(evaluator),
            ratio_derivative: None,
            massive: None,
            singularity_order,
            decay,
            closed_form: false,
            geometry,
            mass_squared,
        }
    }

    /// Attaches `v ↦ ∂_v (T(v)/v)`, needed by the derivative form of the
    /// mass transform.
    pub fn with_ratio_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.ratio_derivative = Some(Arc::new(derivative));
        self
    }

    /// Attaches the closed form `(m, t) ↦ T(m², t)` of the massive
    /// counterpart of a massless profile.
    pub fn with_massive_closed_form<F>(mut self, massive: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.massive = Some(Arc::new(massive));
        self
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_positive("KernelProfile::eval", "t", t)?;
        Ok((self.evaluator)(t))
    }

    /// Unchecked evaluation for integrands.
    pub(crate) fn at(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }

    pub fn ratio_derivative(&self, v: f64) -> Option<f64> {
        self.ratio_derivative.as_ref().map(|d| d(v))
    }

    pub fn has_ratio_derivative(&self) -> bool {
        self.ratio_derivative.is_some()
    }

    /// Closed-form massive value, when the profile carries one.
    pub fn massive_closed_form(&self, m: f64, t: f64) -> Option<Result<f64>> {
        self.massive.as_ref().map(|f| f(m, t))
    }

    /// The profile multiplied by a constant.
    pub fn scaled(&self, factor: f64) -> KernelProfile {
        let ev = self.evaluator.clone();
        let mut out = KernelProfile {
            evaluator: Arc::new(move |t| factor * ev(t)),
            ratio_derivative: None,
            massive: None,
            ..self.clone()
        };
        if let Some(d) = self.ratio_derivative.clone() {
            out.ratio_derivative = Some(Arc::new(move |v| factor * d(v)));
        }
        if let Some(m) = self.massive.clone() {
            out.massive = Some(Arc::new(move |mass, t| m(mass, t).map(|v| factor * v)));
        }
        out
    }

    /// `self − other`. Decay is the slower of the two.
    pub fn difference(&self, other: &KernelProfile) -> KernelProfile {
        let (a, b) = (self.evaluator.clone(), other.evaluator.clone());
        let decay = match (self.decay, other.decay) {
            (Some(x), Some(y)) => Some(slower(x, y)),
            _ => None,
        };
        let ratio_derivative: Option<Eval> = match (self.ratio_derivative.clone(), other.ratio_derivative.clone()) {
            (Some(da), Some(db)) => Some(Arc::new(move |v| da(v) - db(v))),
            _ => None,
        };
        KernelProfile {
            evaluator: Arc::new(move |t| a(t) - b(t)),
            ratio_derivative,
            massive: None,
            singularity_order: self.singularity_order.max(other.singularity_order),
            decay,
            closed_form: self.closed_form && other.closed_form,
            geometry: self.geometry,
            mass_squared: self.mass_squared,
        }
    }

    /// Free massless kernel in `d` dimensions at separation `z`.
    pub fn free_massless(d: u32, z: f64) -> Result<KernelProfile> {
        let geometry = Geometry::new(d, Config::FreeSpace { z })?;
        let c = 0.5 * (d as f64 + 1.0);
        let a = free_prefactor(d)?;
        let z2 = z * z;
        Ok(KernelProfile {
            evaluator: Arc::new(move |t| a * t * (t * t + z2).powf(-c)),
            ratio_derivative: Some(Arc::new(move |v| -2.0 * c * a * v * (v * v + z2).powf(-c - 1.0))),
            massive: Some(Arc::new(move |m, t| free_massive_cylinder(d, z, m, t))),
            singularity_order: if z == 0.0 { -(d as i32) } else { 1 },
            decay: Some(Decay::Algebraic(-(d as f64))),
            closed_form: true,
            geometry,
            mass_squared: 0.0,
        })
    }

    /// Free massive kernel in `d` dimensions at separation `z`.
    pub fn free_massive(d: u32, z: f64, m: f64) -> Result<KernelProfile> {
        check_nonneg("KernelProfile::free_massive", "m", m)?;
        if m == 0.0 {
            return Self::free_massless(d, z);
        }
        let geometry = Geometry::new(d, Config::FreeSpace { z })?;
        free_massive_cylinder(d, z, m, 1.0)?;
        Ok(KernelProfile {
            evaluator: Arc::new(move |t| free_massive_cylinder(d, z, m, t).unwrap_or(f64::NAN)),
            ratio_derivative: None,
            massive: None,
            singularity_order: if z == 0.0 { -(d as i32) } else { 1 },
            decay: Some(Decay::Exponential(m)),
            closed_form: true,
            geometry,
            mass_squared: m * m,
        })
    }

    /// Massless trace of the Dirichlet interval of length `length`.
    pub fn interval_trace(length: f64) -> Result<KernelProfile> {
        let geometry = Geometry::new(1, Config::DirichletInterval { length })?;
        let a = PI / length;
        Ok(KernelProfile {
            evaluator: Arc::new(move |t| 1.0 / (a * t).exp_m1()),
            ratio_derivative: Some(Arc::new(move |v| {
                // T/v = q/(v(1−q)), q = e^{−av}
                let q = (-a * v).exp();
                let one_minus_q = -(-a * v).exp_m1();
                let s = q / one_minus_q;
                -s / (v * v) - a * s / (v * one_minus_q)
            })),
            massive: None,
            singularity_order: -1,
            decay: Some(Decay::Exponential(a)),
            closed_form: true,
            geometry,
            mass_squared: 0.0,
        })
    }

    /// Massive interval trace, summed over modes.
    pub fn interval_trace_massive(length: f64, m: f64, tol: Tolerance) -> Result<KernelProfile> {
        check_nonneg("KernelProfile::interval_trace_massive", "m", m)?;
        if m == 0.0 {
            return Self::interval_trace(length);
        }
        let geometry = Geometry::new(1, Config::DirichletInterval { length })?;
        let spectrum = Spectrum::dirichlet_interval(length, m * m)?;
        Ok(KernelProfile {
            evaluator: Arc::new(move |t| spectral_trace(&spectrum, t, &tol).unwrap_or(f64::NAN)),
            ratio_derivative: None,
            massive: None,
            singularity_order: -1,
            decay: Some(Decay::Exponential((PI / length).hypot(m))),
            closed_form: false,
            geometry,
            mass_squared: m * m,
        })
    }

    /// The free part `L/(πt)` of the interval trace: the free `d = 1`
    /// kernel at `z = 0` integrated over the interval.
    pub fn interval_free_part(length: f64) -> Result<KernelProfile> {
        check_positive("KernelProfile::interval_free_part", "L", length)?;
        let mut p = Self::free_massless(1, 0.0)?.scaled(length);
        p.geometry = Geometry::new(1, Config::DirichletInterval { length })?;
        Ok(p)
    }

    /// Half-line image kernel at points `x`, `y`.
    pub fn halfline(d: u32, x: f64, y: f64, m: f64) -> Result<KernelProfile> {
        let geometry = Geometry::new(d, Config::HalfLineDirichlet { x, y })?;
        check_nonneg("KernelProfile::halfline", "m", m)?;
        let mut p = KernelProfile::new(
            move |t| image_sum_halfline(x, y, d, m, t).unwrap_or(f64::NAN),
            geometry,
            m * m,
            1,
            Some(if m > 0.0 {
                Decay::Exponential(m)
            } else {
                Decay::Algebraic(-(d as f64) - 1.0)
            }),
        );
        p.closed_form = true;
        if x == y {
            p.singularity_order = -(d as i32);
        }
        if m == 0.0 {
            let (plus, minus) = (Self::free_massless(d, (x - y).abs())?, Self::free_massless(d, x + y)?);
            let diff = plus.difference(&minus);
            p.ratio_derivative = diff.ratio_derivative;
            p.massive = Some(Arc::new(move |mass, t| image_sum_halfline(x, y, d, mass, t)));
        }
        Ok(p)
    }
}

fn slower(a: Decay, b: Decay) -> Decay {
    match (a, b) {
        (Decay::Exponential(x), Decay::Exponential(y)) => Decay::Exponential(x.min(y)),
        (Decay::Algebraic(x), Decay::Algebraic(y)) => Decay::Algebraic(x.max(y)),
        (Decay::Algebraic(x), _) | (_, Decay::Algebraic(x)) => Decay::Algebraic(x),
    }
}

fn check_positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_nonneg(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// `Γ(c) π^{−c}` with `c = (d+1)/2`.
fn free_prefactor(d: u32) -> Result<f64> {
    let c = 0.5 * (d as f64 + 1.0);
    Ok(gamma_fn(c)? * PI.powf(-c))
}

/// `Γ(c) π^{−c} t / (t² + z²)^c`, `c = (d+1)/2`.
pub fn free_massless_cylinder(d: u32, z: f64, t: f64) -> Result<f64> {
    const OP: &str = "free_massless_cylinder";
    if d == 0 {
        return Err(domain(OP, "dimension must be >= 1"));
    }
    check_nonneg(OP, "z", z)?;
    check_positive(OP, "t", t)?;
    let c = 0.5 * (d as f64 + 1.0);
    Ok(free_prefactor(d)? * t * (t * t + z * z).powf(-c))
}

/// `2^{1−c} π^{−c} m^c t r^{−c} K_c(m r)`, `r = √(t² + z²)`.
pub fn free_massive_cylinder(d: u32, z: f64, m: f64, t: f64) -> Result<f64> {
    const OP: &str = "free_massive_cylinder";
    check_nonneg(OP, "m", m)?;
    if m == 0.0 {
        return free_massless_cylinder(d, z, t);
    }
    if d == 0 {
        return Err(domain(OP, "dimension must be >= 1"));
    }
    check_nonneg(OP, "z", z)?;
    check_positive(OP, "t", t)?;
    let c = 0.5 * (d as f64 + 1.0);
    let r = t.hypot(z);
    let k = bessel_k(RealOrder::new(c)?, m * r)?;
    Ok(2f64.powf(1.0 - c) * PI.powf(-c) * (m / r).powf(c) * t * k)
}

/// `1/(e^{πt/L} − 1)`, the massless Dirichlet interval trace.
pub fn dirichlet_interval_trace_massless(length: f64, t: f64) -> Result<f64> {
    const OP: &str = "dirichlet_interval_trace_massless";
    check_positive(OP, "L", length)?;
    check_positive(OP, "t", t)?;
    Ok(1.0 / (PI * t / length).exp_m1())
}

/// Dirichlet half-line kernel by the method of images.
pub fn image_sum_halfline(x: f64, y: f64, d: u32, m: f64, t: f64) -> Result<f64> {
    const OP: &str = "image_sum_halfline";
    check_nonneg(OP, "x", x)?;
    check_nonneg(OP, "y", y)?;
    Ok(free_massive_cylinder(d, (x - y).abs(), m, t)? - free_massive_cylinder(d, x + y, m, t)?)
}

/// A discrete positive spectrum `ω₁ < ω₂ < …`.
#[derive(Clone)]
pub struct Spectrum {
    omega: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    gap: Gap,
}

#[derive(Clone, Copy)]
enum Gap {
    /// Gaps `ω_{n+1} − ω_n` are non-decreasing, so the current one bounds the rest.
    Nondecreasing,
    LowerBound(f64),
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectrum").field("omega_1", &self.omega(1)).finish()
    }
}

impl Spectrum {
    /// `ω_n = √(n²π²/L² + μ)`.
    pub fn dirichlet_interval(length: f64, mu: f64) -> Result<Spectrum> {
        check_positive("Spectrum::dirichlet_interval", "L", length)?;
        check_nonneg("Spectrum::dirichlet_interval", "mu", mu)?;
        let a = PI / length;
        Ok(Spectrum {
            omega: Arc::new(move |n| (n as f64 * a).hypot(mu.sqrt())),
            gap: Gap::Nondecreasing,
        })
    }

    /// A caller-defined spectrum with `ω_{n+1} − ω_n ≥ gap_lower_bound` for all `n`.
    pub fn from_fn<F>(omega: F, gap_lower_bound: f64) -> Result<Spectrum>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        check_positive("Spectrum::from_fn", "gap_lower_bound", gap_lower_bound)?;
        Ok(Spectrum {
            omega: Arc::new(omega),
            gap: Gap::LowerBound(gap_lower_bound),
        })
    }

    /// `ω_n`, `n ≥ 1`.
    pub fn omega(&self, n: usize) -> f64 {
        (self.omega)(n)
    }
}

/// `Σ_{n≥1} e^{−t ω_n}`, truncated once the geometric tail bound
/// `e^{−t ω_{N+1}} / (1 − e^{−t·gap})` drops below the tolerance target.
///
/// At most `tol.max_evaluations` terms are summed.
pub fn spectral_trace(spectrum: &Spectrum, t: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "spectral_trace";
    check_positive(OP, "t", t)?;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut prev = spectrum.omega(1);
    if !(prev > 0.0) {
        return Err(domain(OP, format!("omega_1 must be > 0, got {prev}")));
    }
    for n in 1..=tol.max_evaluations {
        let next = spectrum.omega(n + 1);
        let gap = match spectrum.gap {
            Gap::Nondecreasing => next - prev,
            Gap::LowerBound(g) => g,
        };
        neumaier_add(&mut sum, &mut comp, (-t * prev).exp());
        let tail = (-t * next).exp() / -(-t * gap).exp_m1();
        if tail < tol.target(sum + comp) {
            return Ok(sum + comp);
        }
        prev = next;
    }
    Err(crate::Error::NotConverged {
        op: OP,
        estimate: sum + comp,
        error: (-t * prev).exp() * tol.max_evaluations as f64,
    })
}

/// Massive interval trace as the closed massless trace plus the mode-wise
/// mass correction `Σ e^{−tnπ/L}(e^{−t(ω_n − nπ/L)} − 1)`.
///
/// Agrees with [`spectral_trace`] but keeps full relative accuracy at small
/// `t`, where the direct sum loses digits.
pub fn dirichlet_interval_trace(length: f64, mu: f64, t: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "dirichlet_interval_trace";
    check_nonneg(OP, "mu", mu)?;
    let base = dirichlet_interval_trace_massless(length, t)?;
    if mu == 0.0 {
        return Ok(base);
    }
    Ok(base + interval_mass_correction(length, mu, t, tol)?)
}

/// `Σ_n e^{−t nπ/L} (e^{−t(ω_n − nπ/L)} − 1)` with `ω_n = √(n²π²/L² + μ)`.
pub fn interval_mass_correction(length: f64, mu: f64, t: f64, tol: &Tolerance) -> Result<f64> {
    const OP: &str = "interval_mass_correction";
    check_positive(OP, "L", length)?;
    check_positive(OP, "t", t)?;
    check_nonneg(OP, "mu", mu)?;
    let a = PI / length;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for n in 1..=tol.max_evaluations {
        let k = n as f64 * a;
        let omega = k.hypot(mu.sqrt());
        let shift = mu / (omega + k);
        neumaier_add(&mut sum, &mut comp, (-t * k).exp() * (-t * shift).exp_m1());
        // |term_j| ≤ e^{−t j a} t μ / (2 j a) for j > n.
        let next = k + a;
        let tail = (-t * next).exp() / -(-t * a).exp_m1() * t * mu / (2.0 * next);
        if tail < tol.target(sum + comp) {
            return Ok(sum + comp);
        }
    }
    Err(crate::Error::NotConverged {
        op: OP,
        estimate: sum + comp,
        error: f64::NAN,
    })
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let s = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - s) + x;
    } else {
        *comp += (x - s) + *sum;
    }
    *sum = s;
}
