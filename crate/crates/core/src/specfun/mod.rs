//! Special functions used throughout the crate.
//!
//! Everything here is pure `f64` code with no external numerical
//! dependencies: Bessel functions of the first kind of orders 0 and 1,
//! the modified Bessel function `K_ν` of real order, the gamma function and
//! the positive zeros of `J₀` and `J₁`.

mod bessel_j;
mod bessel_k;
mod gamma;
mod zeros;

pub use bessel_j::{bessel_j0, bessel_j1};
pub use bessel_k::{bessel_k, bessel_k_checked, bessel_k_scaled, KValue, RealOrder};
pub use gamma::gamma_fn;
pub use zeros::{bessel_zero, j0_zeros, j1_zeros};

pub(crate) use bessel_j::{j0, j1};

/// Euler's constant γ = 0.5772156649...
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Order of a Bessel function of the first kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            BesselOrder::Zero => j0(x),
            BesselOrder::One => j1(x),
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = crate::Error;

    fn try_from(order: u32) -> crate::Result<Self> {
        match order {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            other => Err(crate::error::domain(
                "BesselOrder",
                format!("only orders 0 and 1 are supported, got {other}"),
            )),
        }
    }
}
