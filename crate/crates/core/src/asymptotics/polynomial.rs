use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Field of coefficients.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact.
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// `n / d` as an exact rational.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in `μ` with ascending coefficients; trailing zeros trimmed.
#[derive(Clone, PartialEq)]
pub struct MuPolynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> fmt::Debug for MuPolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MuPolynomial{:?}", self.coeffs)
    }
}

impl<F: Scalar> MuPolynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        MuPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        MuPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn exact(&self) -> bool {
        F::EXACT
    }

    pub fn eval(&self, mu: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * mu.clone() + c.clone())
    }

    pub fn eval_f64(&self, mu: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * mu + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_i64(k as i64))
                .collect(),
        )
    }

    /// Antiderivative taking the value `c0` at `μ = 0`.
    pub fn antiderivative(&self, c0: F) -> Self {
        let mut out = vec![c0];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() / F::from_i64(k as i64 + 1)),
        );
        Self::new(out)
    }

    pub fn scale(&self, factor: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Largest coefficient magnitude, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl<F: Scalar> Add for &MuPolynomial<F> {
    type Output = MuPolynomial<F>;
    fn add(self, rhs: Self) -> MuPolynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        MuPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Scalar> Sub for &MuPolynomial<F> {
    type Output = MuPolynomial<F>;
    fn sub(self, rhs: Self) -> MuPolynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        MuPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}
