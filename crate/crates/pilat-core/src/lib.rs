//! Inductive invariant synthesis for simple polynomial loops.
//!
//! The pipeline: parse a loop ([`ir`]), lift its body to a linear map over a
//! monomial basis ([`lift`]), extract left eigenvectors with exact rational
//! arithmetic ([`linalg`]), classify them as exact/convergent/divergent
//! relations and, for non-deterministic loops, search for an inductive bound
//! `k` with a certified polynomial optimization oracle ([`optim`]). The
//! [`invariant`] module orchestrates the whole thing and produces a report.
//!
//! Core arithmetic types ([`poly::MPoly`], [`poly::UniPoly`],
//! [`linalg::Matrix`], [`num::Interval`]) are generic over a [`Scalar`];
//! the invariant machinery instantiates them with arbitrary-precision
//! rationals so every eigenvalue, kernel and bound is exact. The aliases
//! below fix the concrete types used throughout.

pub(crate) mod graph;
pub mod invariant;
pub mod ir;
pub mod lift;
pub mod linalg;
pub mod num;
pub mod optim;
pub mod poly;

pub use crate::num::scalar::Scalar;

/// Exact rational scalar used by the whole invariant pipeline.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer backing [`Rat`].
pub type Int = num_bigint::BigInt;

/// Dense matrix over exact rationals.
pub type RatMatrix = linalg::Matrix<Rat>;
/// Univariate polynomial with exact rational coefficients.
pub type RatUniPoly = poly::UniPoly<Rat>;
/// Multivariate polynomial with exact rational coefficients.
pub type RatPoly = poly::MPoly<Rat>;
/// Closed interval with exact rational endpoints.
pub type RatInterval = num::Interval<Rat>;
