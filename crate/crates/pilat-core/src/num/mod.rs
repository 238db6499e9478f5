//! Numeric support: the scalar abstraction, exact rational helpers and
//! interval arithmetic.

pub mod interval;
pub mod ratio;
pub mod scalar;

pub use interval::Interval;
