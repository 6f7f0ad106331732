use std::collections::BTreeMap;

use super::polynomial::{MuPolynomial, Scalar};
use super::spline::CubicSpline;
use crate::error::{domain, precondition};
use crate::numdiff::loglog_slope;
use crate::quad::{integrate_finite_points, Tolerance};
use crate::Result;

/// The coefficient `e_{d+1}(μ)` that the recursion leaves free.
#[derive(Debug, Clone, PartialEq)]
pub enum Renormalized<F: Scalar> {
    Polynomial(MuPolynomial<F>),
    /// Interpolated from `(μ, value)` pairs; the table must start at `μ = 0`.
    Tabulated(CubicSpline),
}

impl<F: Scalar> Renormalized<F> {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        if points.first().map(|p| p.0) != Some(0.0) {
            return Err(domain("Renormalized::tabulated", "table must start at mu = 0"));
        }
        Ok(Renormalized::Tabulated(CubicSpline::new(points)?))
    }

    /// `I^k E` with `I` integration from 0; `k = −1` is `E′`.
    fn iterated_poly(&self, k: i32) -> Option<MuPolynomial<F>> {
        let Renormalized::Polynomial(p) = self else { return None };
        let mut q = p.clone();
        if k < 0 {
            return Some(q.derivative());
        }
        for _ in 0..k {
            q = q.antiderivative(F::zero());
        }
        Some(q)
    }

    fn iterated(&self, k: i32, mu: f64) -> Result<f64> {
        match self {
            Renormalized::Polynomial(_) => Ok(self.iterated_poly(k).unwrap().eval_f64(mu)),
            Renormalized::Tabulated(s) => match k {
                -1 => s.derivative(mu),
                0 => s.eval(mu),
                _ => {
                    if mu == 0.0 {
                        return Ok(0.0);
                    }
                    // Cauchy: I^k E(μ) = ∫₀^μ (μ−x)^{k−1}/(k−1)! E(x) dx.
                    let fact: f64 = (1..k).map(|i| i as f64).product();
                    let mut pts: Vec<f64> = s.knots().iter().copied().filter(|&x| x < mu).collect();
                    pts.push(mu);
                    let tol = Tolerance::new(1e-14, 1e-12, 200_000)?;
                    let r = integrate_finite_points(
                        |x| (mu - x).powi(k - 1) / fact * s.eval(x).unwrap_or(f64::NAN),
                        &pts,
                        &tol,
                    )?;
                    Ok(r.require_converged("Renormalized::iterated")?.value)
                }
            },
        }
    }
}

/// `poly(μ) + Σ_k w_k · I^k E(μ)`, with `E = e_{d+1}` supplied from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient<F: Scalar> {
    pub poly: MuPolynomial<F>,
    supplied: BTreeMap<i32, F>,
}

impl<F: Scalar> Coefficient<F> {
    pub fn polynomial(poly: MuPolynomial<F>) -> Self {
        Coefficient {
            poly,
            supplied: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::polynomial(MuPolynomial::zero())
    }

    /// `E` itself.
    pub fn supplied() -> Self {
        Coefficient {
            poly: MuPolynomial::zero(),
            supplied: BTreeMap::from([(0, F::one())]),
        }
    }

    /// Weights of `I^k E` (`k = −1` meaning `E′`).
    pub fn supplied_weights(&self) -> &BTreeMap<i32, F> {
        &self.supplied
    }

    pub fn is_polynomial(&self) -> bool {
        self.supplied.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.supplied.is_empty()
    }

    fn combine(&self, other: &Self, sign: F) -> Self {
        let poly = &self.poly + &other.poly.scale(&sign);
        let mut supplied = self.supplied.clone();
        for (k, w) in &other.supplied {
            let v = supplied.remove(k).unwrap_or_else(F::zero) + sign.clone() * w.clone();
            if !v.is_zero() {
                supplied.insert(*k, v);
            }
        }
        Coefficient { poly, supplied }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, F::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -F::one())
    }

    pub fn scale(&self, factor: &F) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Coefficient {
            poly: self.poly.scale(factor),
            supplied: self.supplied.iter().map(|(k, w)| (*k, w.clone() * factor.clone())).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Coefficient {
            poly: self.poly.derivative(),
            supplied: self.supplied.iter().map(|(k, w)| (k - 1, w.clone())).collect(),
        }
    }

    /// Antiderivative equal to `c0` at `μ = 0`.
    fn antiderivative(&self, c0: F) -> Result<Self> {
        if self.supplied.contains_key(&-1) {
            return Err(precondition("Coefficient::antiderivative", "cannot integrate E′ without E(0)"));
        }
        Ok(Coefficient {
            poly: self.poly.antiderivative(c0),
            supplied: self.supplied.iter().map(|(k, w)| (k + 1, w.clone())).collect(),
        })
    }

    pub fn eval(&self, mu: f64, e: &Renormalized<F>) -> Result<f64> {
        let mut v = self.poly.eval_f64(mu);
        for (k, w) in &self.supplied {
            v += w.to_f64() * e.iterated(*k, mu)?;
        }
        Ok(v)
    }

    /// The coefficient as one polynomial, when `E` is polynomial.
    pub fn expand(&self, e: &Renormalized<F>) -> Option<MuPolynomial<F>> {
        let mut p = self.poly.clone();
        for (k, w) in &self.supplied {
            p = &p + &e.iterated_poly(*k)?.scale(w);
        }
        Some(p)
    }
}

/// Massless data `e_s(0)` and `f_s(0)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialData<F> {
    pub e: BTreeMap<usize, F>,
    pub f: BTreeMap<usize, F>,
}

/// `T ~ Σ e_s t^{−d+s} + Σ_{s−d odd, s>d} f_s t^{−d+s} ln t` through `s = order`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion<F: Scalar> {
    d: u32,
    order: usize,
    e_terms: BTreeMap<usize, Coefficient<F>>,
    f_terms: BTreeMap<usize, Coefficient<F>>,
    e_renorm: Renormalized<F>,
}

fn has_log(d: u32, s: usize) -> bool {
    s > d as usize && (s - d as usize) % 2 == 1
}

impl<F: Scalar> AsymptoticExpansion<F> {
    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Index `d + 1` of the supplied coefficient.
    pub fn renormalized_index(&self) -> usize {
        self.d as usize + 1
    }

    pub fn renormalized(&self) -> &Renormalized<F> {
        &self.e_renorm
    }

    pub fn e(&self, s: usize) -> Option<&Coefficient<F>> {
        self.e_terms.get(&s)
    }

    pub fn f(&self, s: usize) -> Option<&Coefficient<F>> {
        self.f_terms.get(&s)
    }

    pub fn e_terms(&self) -> &BTreeMap<usize, Coefficient<F>> {
        &self.e_terms
    }

    pub fn f_terms(&self) -> &BTreeMap<usize, Coefficient<F>> {
        &self.f_terms
    }

    /// `Σ_{s ≤ through}` of the expansion at `(μ, t)`.
    pub fn partial_sum(&self, mu: f64, t: f64, through: usize) -> Result<f64> {
        let mut sum = 0.0;
        for s in 0..=through.min(self.order) {
            let power = t.powi(s as i32 - self.d as i32);
            sum += self.e_terms[&s].eval(mu, &self.e_renorm)? * power;
            if let Some(f) = self.f_terms.get(&s) {
                sum += f.eval(mu, &self.e_renorm)? * power * t.ln();
            }
        }
        Ok(sum)
    }
}

/// Solves the μ-recursions for the cylinder coefficients through `order`.
///
/// For `s − d` odd and `s > d + 1`: `(s−d−1) f_s′ = f_{s−2}/2`; at
/// `s = d + 1`: `f_{d+1}′ = e_{d−1}/2`. For every `s ≠ d + 1`:
/// `(s−d−1) e_s′ = e_{s−2}/2 − f_s′`, undefined terms being zero. Each is
/// integrated from the massless data. `e_{d+1}` is `e_renorm`.
pub fn solve_cylinder_recursion<F: Scalar>(
    initial: &InitialData<F>,
    d: u32,
    e_renorm: Renormalized<F>,
    order: usize,
) -> Result<AsymptoticExpansion<F>> {
    const OP: &str = "solve_cylinder_recursion";
    if d == 0 {
        return Err(domain(OP, "dimension must be >= 1"));
    }
    let crit = d as usize + 1;
    if let Some(&bad) = initial.f.keys().find(|&&s| !has_log(d, s)) {
        return Err(precondition(OP, format!("f_{bad} is not a term of the expansion (needs s - d odd and s > d)")));
    }
    let mut e_terms: BTreeMap<usize, Coefficient<F>> = BTreeMap::new();
    let mut f_terms: BTreeMap<usize, Coefficient<F>> = BTreeMap::new();
    let zero = Coefficient::zero();
    for s in 0..=order {
        let mut f_prime = None;
        if has_log(d, s) {
            let f0 = initial
                .f
                .get(&s)
                .cloned()
                .ok_or_else(|| precondition(OP, format!("missing initial datum f_{s}(0)")))?;
            let fp = if s == crit {
                e_terms.get(&(d as usize - 1)).unwrap_or(&zero).scale(&half())
            } else {
                let k = F::from_i64((s - crit) as i64);
                f_terms.get(&(s - 2)).unwrap_or(&zero).scale(&(half::<F>() / k))
            };
            f_terms.insert(s, fp.antiderivative(f0)?);
            f_prime = Some(fp);
        }
        if s == crit {
            e_terms.insert(s, Coefficient::supplied());
            continue;
        }
        let e0 = initial
            .e
            .get(&s)
            .cloned()
            .ok_or_else(|| precondition(OP, format!("missing initial datum e_{s}(0)")))?;
        let source = match s.checked_sub(2) {
            Some(p) => e_terms[&p].scale(&half()),
            None => Coefficient::zero(),
        };
        let source = match &f_prime {
            Some(fp) => source.sub(fp),
            None => source,
        };
        let denom = F::from_i64(s as i64 - crit as i64);
        let ep = source.scale(&(F::one() / denom));
        e_terms.insert(s, ep.antiderivative(e0)?);
    }
    Ok(AsymptoticExpansion {
        d,
        order,
        e_terms,
        f_terms,
        e_renorm,
    })
}

fn half<F: Scalar>() -> F {
    F::one() / F::from_i64(2)
}

/// One order of the expansion substituted into `∂²(T/t)/∂μ∂t = T/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityTerm<F: Scalar> {
    pub s: usize,
    /// Coefficient of `t^{−d+s−2} ln t` rather than `t^{−d+s−2}`.
    pub log: bool,
    pub lhs: Coefficient<F>,
    pub rhs: Coefficient<F>,
}

impl<F: Scalar> IdentityTerm<F> {
    /// Exact equality of both sides (as symbolic coefficients).
    pub fn holds(&self) -> bool {
        self.lhs.sub(&self.rhs).is_zero()
    }
}

/// Reassembles both sides of the substituted equation order by order:
///
/// - `t^{−d+s−2}`: `(s−d−1) e_s′ + f_s′ = e_{s−2}/2`,
/// - `t^{−d+s−2} ln t`: `(s−d−1) f_s′ = f_{s−2}/2`.
pub fn substitution_identity<F: Scalar>(exp: &AsymptoticExpansion<F>) -> Vec<IdentityTerm<F>> {
    let d = exp.d as i64;
    let zero = Coefficient::zero();
    let mut out = Vec::new();
    for s in 0..=exp.order {
        let factor = F::from_i64(s as i64 - d - 1);
        let mut lhs = exp.e_terms[&s].derivative().scale(&factor);
        if let Some(f) = exp.f_terms.get(&s) {
            lhs = lhs.add(&f.derivative());
        }
        let rhs = match s.checked_sub(2) {
            Some(p) => exp.e_terms[&p].scale(&half()),
            None => zero.clone(),
        };
        out.push(IdentityTerm { s, log: false, lhs, rhs });
        if let Some(f) = exp.f_terms.get(&s) {
            let lhs = f.derivative().scale(&factor);
            let rhs = s
                .checked_sub(2)
                .and_then(|p| exp.f_terms.get(&p))
                .map_or(zero.clone(), |c| c.scale(&half()));
            out.push(IdentityTerm { s, log: true, lhs, rhs });
        }
    }
    out
}

/// Outcome of comparing a kernel with its truncated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// `(t, T(t) − partial sum)`.
    pub residuals: Vec<(f64, f64)>,
    /// Fitted power of the residual: a log-log slope, or the `p` of
    /// `t^p (a + b ln t)` when the first omitted order carries a logarithm.
    pub empirical_order: Option<f64>,
    /// Power `−d + N + 1` of the first omitted order.
    pub expected_order: f64,
    pub log_factor: bool,
    /// Residuals reached rounding level; no slope was fitted.
    pub floor_reached: bool,
    pub passed: bool,
}

/// Compares `t_eval` at fixed `μ` with the expansion through its full
/// order on a grid of `t` values.
pub fn expansion_fit_check<F: Scalar, T>(t_eval: T, exp: &AsymptoticExpansion<F>, mu: f64, t_grid: &[f64]) -> Result<FitReport>
where
    T: Fn(f64) -> Result<f64>,
{
    const OP: &str = "expansion_fit_check";
    if t_grid.len() < 2 || t_grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(domain(OP, "t grid needs at least two positive values"));
    }
    let n = exp.order;
    let expected_order = n as f64 + 1.0 - exp.d as f64;
    let log_factor = has_log(exp.d, n + 1);
    let mut residuals = Vec::with_capacity(t_grid.len());
    let mut fit_t = Vec::new();
    let mut fit_r = Vec::new();
    for &t in t_grid {
        let value = t_eval(t)?;
        let r = value - exp.partial_sum(mu, t, n)?;
        residuals.push((t, r));
        if r.abs() > 1e-13 * value.abs().max(f64::MIN_POSITIVE) {
            fit_t.push(t);
            fit_r.push(r);
        }
    }
    let floor_reached = fit_t.len() < 2;
    let empirical_order = if floor_reached {
        None
    } else if log_factor && fit_t.len() >= 4 {
        log_power_fit(&fit_t, &fit_r, expected_order)
    } else {
        loglog_slope(&fit_t, &fit_r)
    };
    let passed = floor_reached || empirical_order.is_some_and(|p| p >= expected_order - 0.1);
    Ok(FitReport {
        residuals,
        empirical_order,
        expected_order,
        log_factor,
        floor_reached,
        passed,
    })
}

/// Power `p` minimizing the relative misfit of `r ≈ t^p (a + b ln t)`,
/// scanned around `guess` with `a`, `b` solved by least squares.
fn log_power_fit(ts: &[f64], rs: &[f64], guess: f64) -> Option<f64> {
    let misfit = |p: f64| {
        // Rows scaled by 1/r: minimize Σ (1 − t^p (a + b ln t)/r)².
        let rows: Vec<(f64, f64)> = ts.iter().zip(rs).map(|(t, r)| (t.powf(p) / r, t.powf(p) * t.ln() / r)).collect();
        let (mut s11, mut s12, mut s22, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(u, v) in &rows {
            s11 += u * u;
            s12 += u * v;
            s22 += v * v;
            y1 += u;
            y2 += v;
        }
        let det = s11 * s22 - s12 * s12;
        if det.abs() < 1e-300 {
            return f64::INFINITY;
        }
        let a = (y1 * s22 - y2 * s12) / det;
        let b = (s11 * y2 - s12 * y1) / det;
        rows.iter().map(|(u, v)| (1.0 - a * u - b * v).powi(2)).sum::<f64>()
    };
    let mut best = (f64::INFINITY, None);
    for k in -300..=300 {
        let p = guess + k as f64 * 0.01;
        let c = misfit(p);
        if c < best.0 {
            best = (c, Some(p));
        }
    }
    best.1
}
