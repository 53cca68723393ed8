//! Scalar abstraction shared by every container, kernel and layer.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point element type: `f32` for the engine, `f64` where extra headroom helps.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Raw IEEE-754 bits widened to 64 bits, for bitwise comparisons and fingerprints.
    fn bits(self) -> u64;

    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {
    fn bits(self) -> u64 {
        u64::from(self.to_bits())
    }
}

impl Scalar for f64 {
    fn bits(self) -> u64 {
        self.to_bits()
    }
}
