//! Scalar abstraction for all numerical kernels in this crate.
//!
//! Every algorithm is written against [`Scalar`] so the same code runs in
//! `f32` or `f64`. The concrete aliases at the crate root (`Tensor`,
//! `Matrix64`, ...) pin `f64`, which is what the file formats and the CLI
//! use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable as tensor element type.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand used throughout the crate for `f64` literals in generic code.
pub(crate) fn fl<T: Scalar>(x: f64) -> T {
    T::of(x)
}
