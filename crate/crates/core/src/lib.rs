//! Mass dependence of regularized vacuum energy.
//!
//! The cylinder kernel `T(μ, t) = Σ e^{-t ω_n}` of an operator `H = H₀ + μ`
//! satisfies `∂²(T/t)/∂μ∂t = T/2`. This crate turns massless kernels into
//! massive ones through Bessel integral operators, reproduces the
//! four-term energy decomposition of a massive scalar field on a Dirichlet
//! interval, and solves the recursions that fix the μ-dependence of the
//! small-`t` expansion coefficients.
//!
//! Module map:
//!
//! - [`specfun`]: Bessel `J₀`, `J₁`, `K_ν`, gamma, zeros of `J₀`/`J₁`.
//! - [`quad`]: finite, decaying and Bessel-oscillatory quadrature.
//! - [`kernels`]: free and interval cylinder kernels, spectral sums, images.
//! - [`mass_transform`]: the massless-to-massive integral operators.
//! - [`casimir`]: the interval energy breakdown.
//! - [`asymptotics`]: heat and cylinder coefficient recursions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod casimir;
mod error;
pub mod kernels;
pub mod mass_transform;
pub mod numdiff;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
