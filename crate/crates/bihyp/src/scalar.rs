//! Scalar abstraction for the algebraic core.
//!
//! Arithmetic on bihyperbolic numbers and on module elements is plain
//! componentwise real arithmetic, so it is written once over [`Scalar`] and
//! instantiated for `f32` and `f64`. Everything that samples, solves linear
//! programs, or serializes works with the `f64` aliases exported from the
//! crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar usable as the coefficient field.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + 'static {
    /// Lossy conversion from `f64`, used for tolerances and literals.
    fn from_config(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any Scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
