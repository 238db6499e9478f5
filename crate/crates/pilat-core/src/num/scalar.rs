use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, NumAssign, Signed};

/// Field scalar the generic core is written against: exact rationals for the
/// invariant pipeline, `f64` for the approximate eigenvalue fallback and for
/// local descent inside the optimizer.
pub trait Scalar:
    NumAssign + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + 'static
{
    /// Scalar from a small signed integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer out of range for scalar")
    }
}

impl<T> Scalar for T where
    T: NumAssign + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + 'static
{
}
