//! Floating point abstraction shared by every algorithm in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Coordinate type: `f32` or `f64`.
///
/// Geometric predicates widen to `f64` (exact for both) and fall back to
/// big-integer arithmetic, so the combinatorial results (Delaunay edges,
/// interior counts) do not depend on the chosen precision. Distances and
/// thresholds are evaluated in `Self`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless widening used by the exact predicates.
    fn widen(self) -> f64;

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize is representable")
    }

    fn of_f64(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64")
    }
}

impl Scalar for f32 {
    #[inline]
    fn widen(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn widen(self) -> f64 {
        self
    }
}
