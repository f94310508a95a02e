//! Floating-point scalar abstraction: every module is generic over `Scalar`,
//! with concrete `f32`/`f64` aliases exported at the crate root.

use std::fmt::{Debug, Display};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used to feed RNG draws and constants
    /// into generic code.
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts into any scalar")
    }

    /// π/2 as a scalar.
    fn half_pi() -> Self {
        Self::from_f64_lossy(std::f64::consts::FRAC_PI_2)
    }

    /// π as a scalar.
    fn pi() -> Self {
        Self::from_f64_lossy(std::f64::consts::PI)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
