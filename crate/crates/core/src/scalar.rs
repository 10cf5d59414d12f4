//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar underlying the complex matrices: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance of `base`, widened to a few hundred ulps when the scalar
    /// type cannot resolve `base` itself. For `f64` every tolerance used in
    /// this crate is returned unchanged.
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        Self::lit(base).max(floor)
    }

    /// Clamps a value that should be nonnegative in exact arithmetic.
    /// Returns `None` when it is more negative than `-slack`.
    fn clamp_nonneg(self, slack: Self) -> Option<Self> {
        if self >= Self::zero() {
            Some(self)
        } else if self >= -slack {
            Some(Self::zero())
        } else {
            None
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
