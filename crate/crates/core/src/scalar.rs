//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same kernels run in f32 or f64. The concrete aliases used by the CLI live
//! at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by all kernels in this crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Display
    + Debug
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Display
        + Debug
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Cast an f64 literal into the working scalar type.
#[inline]
pub fn cst<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("literal must be representable in the scalar type")
}

/// Cast a usize (cell counts, step indices) into the working scalar type.
#[inline]
pub fn cst_usize<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("count must be representable in the scalar type")
}
