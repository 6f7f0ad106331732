//! Small-`t` expansion coefficients and their mass dependence.
//!
//! Coefficients are polynomials in `μ` over a [`Scalar`] field: `f64` for
//! numerics, [`BigRational`] when identities must hold exactly.

mod cylinder;
mod heat;
mod interval;
mod polynomial;
mod spline;

pub use cylinder::{
    expansion_fit_check, solve_cylinder_recursion, substitution_identity, Coefficient, AsymptoticExpansion, FitReport,
    IdentityTerm, InitialData, Renormalized,
};
pub use heat::{heat_coeffs_massive, heat_coeffs_massive_poly, heat_pde_residual, heat_to_cylinder, CylinderFromHeat};
pub use interval::{interval_initial_data, interval_renormalized_table};
pub use polynomial::{rational, MuPolynomial, Scalar};
pub use spline::CubicSpline;

pub use num_rational::BigRational;
