//! Determinacy diagnostics for truncated moment sequences: one-variable
//! Hamburger and Stieltjes criteria, separating-function gaps in several
//! variables, and moment problems on polynomial curves.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the two
//! supported arithmetics.

pub mod curves;
pub mod error;
pub mod hamburger;
pub mod lp;
pub mod moments;
pub mod multiindex;
pub mod poly;
pub mod riesz;
pub mod scalar;

pub use error::{Error, Result};
pub use moments::{MomentSequence, SupportHint};
pub use scalar::{BigFloat, Scalar, ScalarMode};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// Moments in exact rational arithmetic.
pub type RationalMoments = MomentSequence<Rational>;
/// Moments in binary floating point at a per-sequence precision.
pub type FloatMoments = MomentSequence<BigFloat>;
