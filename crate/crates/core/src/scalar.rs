//! Scalar abstraction for fitness values, statistics and model scores.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for fitness, fitness statistics and network scores.
///
/// Implemented for `f32` and `f64`. Counts stay integral everywhere; only
/// quantities that can be fractional go through this trait.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable in scalar")
    }

    /// Converts a count into this scalar.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
