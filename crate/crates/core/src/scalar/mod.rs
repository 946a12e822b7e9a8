//! Scalar abstraction shared by every numeric kernel.
//!
//! Kernels are generic over [`Scalar`]; two implementations ship:
//! [`BigRational`] (error-free, the mode used for acceptance runs on
//! integer-valued moments) and [`BigFloat`] (binary floating point with a
//! precision fixed per sequence). The precision lives in the
//! [`Scalar::Context`] carried by every moment sequence, so one sequence never
//! mixes modes.

mod bigfloat;
mod rational;

use std::fmt::{self, Debug};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bigfloat::BigFloat;
pub use rational::parse_rational;

/// Bits carried by rational approximations of irrational quantities
/// (square roots, `pi`, trigonometric samples) in exact mode.
pub const RATIONAL_APPROX_BITS: u32 = 256;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Rational,
    Float { bits: u32 },
}

impl ScalarMode {
    /// Default float precision for a degree budget `n`: `64 + 4 n^2` bits.
    pub fn default_float(max_degree: usize) -> Self {
        let n = max_degree as u64;
        ScalarMode::Float {
            bits: (64 + 4 * n * n).min(u32::MAX as u64) as u32,
        }
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Rational => f.write_str("rational"),
            ScalarMode::Float { bits } => write!(f, "float:{bits}"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rational" {
            return Ok(ScalarMode::Rational);
        }
        if let Some(bits) = s.strip_prefix("float:") {
            let bits: u32 = bits
                .parse()
                .map_err(|_| Error::Parse(format!("bad float precision in `{s}`")))?;
            if bits < 8 {
                return Err(Error::Parse(format!("float precision too small: {bits}")));
            }
            return Ok(ScalarMode::Float { bits });
        }
        Err(Error::Parse(format!("unknown scalar mode `{s}`")))
    }
}

impl Serialize for ScalarMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScalarMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A number type the criteria can run on.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Per-sequence arithmetic context (`()` for rationals, bits for floats).
    type Context: Clone + Debug + PartialEq + Send + Sync;

    fn is_exact() -> bool;
    fn mode(ctx: &Self::Context) -> ScalarMode;
    /// Context for a requested mode; fails when the mode belongs to the other
    /// scalar family.
    fn context_for(mode: ScalarMode) -> Result<Self::Context>;
    fn context(&self) -> Self::Context;
    /// Whether the value may live in `ctx` without re-rounding (exact
    /// constants fit every context).
    fn fits_context(&self, ctx: &Self::Context) -> bool;

    fn from_rational(r: &BigRational, ctx: &Self::Context) -> Self;
    /// Exact injection of a finite double (dyadic rational).
    fn from_f64(x: f64, ctx: &Self::Context) -> Self;
    fn to_f64(&self) -> f64;
    /// The exact rational value (floats are dyadic rationals).
    fn to_rational(&self) -> BigRational;
    /// `log2 |x|`, finite for huge or tiny magnitudes that overflow `f64`.
    fn log2_abs(&self) -> f64;
    /// Re-round into `ctx` (identity for rationals).
    fn in_context(&self, ctx: &Self::Context) -> Self;
    /// A strictly lower precision used to shadow a float computation and
    /// measure how many bits survive; `None` in exact mode.
    fn shadow_context(ctx: &Self::Context) -> Option<Self::Context>;

    fn sqrt(&self) -> Self;
    fn pi(ctx: &Self::Context) -> Self;
    fn exp(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;

    /// Interchange text: `p/q` for rationals, hex-float for floats.
    fn to_text(&self) -> String;
    /// Accepts the interchange text of the mode, or a plain decimal string.
    fn from_text(s: &str, ctx: &Self::Context) -> Result<Self>;
    /// Human-readable decimal.
    fn to_decimal(&self) -> String;

    fn from_int(n: i64, ctx: &Self::Context) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)), ctx)
    }
    fn from_bigint(n: &BigInt, ctx: &Self::Context) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()), ctx)
    }
    fn ratio(num: i64, den: i64, ctx: &Self::Context) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), ctx)
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
    /// Integer power with a non-negative exponent.
    fn powi(&self, k: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        out
    }
}

impl Scalar for BigFloat {
    type Context = u32;

    fn is_exact() -> bool {
        false
    }
    fn mode(ctx: &u32) -> ScalarMode {
        ScalarMode::Float { bits: *ctx }
    }
    fn context_for(mode: ScalarMode) -> Result<u32> {
        match mode {
            ScalarMode::Float { bits } => Ok(bits),
            ScalarMode::Rational => Err(Error::ModeMismatch {
                left: "float".into(),
                right: "rational".into(),
            }),
        }
    }
    fn context(&self) -> u32 {
        self.precision()
    }
    fn fits_context(&self, ctx: &u32) -> bool {
        self.precision() == 0 || self.precision() == *ctx
    }
    fn from_rational(r: &BigRational, ctx: &u32) -> Self {
        BigFloat::from_rational(r, *ctx)
    }
    fn from_f64(x: f64, ctx: &u32) -> Self {
        BigFloat::from_f64(x, *ctx).expect("finite f64")
    }
    fn to_f64(&self) -> f64 {
        self.to_f64_value()
    }
    fn to_rational(&self) -> BigRational {
        BigFloat::to_rational(self)
    }
    fn log2_abs(&self) -> f64 {
        BigFloat::log2_abs(self)
    }
    fn in_context(&self, ctx: &u32) -> Self {
        self.with_precision(*ctx)
    }
    fn shadow_context(ctx: &u32) -> Option<u32> {
        Some(
            ctx.saturating_sub(32)
                .max(24)
                .min(ctx.saturating_sub(1))
                .max(1),
        )
    }
    fn sqrt(&self) -> Self {
        self.sqrt_value()
    }
    fn pi(ctx: &u32) -> Self {
        BigFloat::pi(*ctx)
    }
    fn exp(&self) -> Self {
        self.exp_value()
    }
    fn cos(&self) -> Self {
        self.cos_sin().0
    }
    fn sin(&self) -> Self {
        self.cos_sin().1
    }
    fn to_text(&self) -> String {
        self.to_hex()
    }
    fn from_text(s: &str, ctx: &u32) -> Result<Self> {
        let t = s.trim();
        if t.contains("0x") || t.contains("0X") {
            return BigFloat::parse_hex(t, *ctx)
                .ok_or_else(|| Error::Parse(format!("bad hex-float `{s}`")));
        }
        Ok(BigFloat::from_rational(&parse_rational(t)?, *ctx))
    }
    fn to_decimal(&self) -> String {
        BigFloat::to_decimal(self)
    }
}

/// Complex numbers over a scalar.
pub type Cx<S> = Complex<S>;

pub fn cx_abs_sqr<S: Scalar>(z: &Cx<S>) -> S {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

/// Magnitude-aware approximate equality used for float-mode checks; exact
/// equality in rational mode.
pub fn close<S: Scalar>(a: &S, b: &S, rel: f64) -> bool {
    if S::is_exact() {
        return a == b;
    }
    let diff = (a.clone() - b.clone()).log2_abs();
    let scale = a.log2_abs().max(b.log2_abs());
    if diff == f64::NEG_INFINITY {
        return true;
    }
    diff <= scale + rel.log2()
}

/// The imaginary unit in the context of `ctx`.
pub fn imag_unit<S: Scalar>(ctx: &S::Context) -> Cx<S> {
    Complex::new(S::from_int(0, ctx), S::from_int(1, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn mode_text_round_trip() {
        for m in [ScalarMode::Rational, ScalarMode::Float { bits: 512 }] {
            assert_eq!(m.to_string().parse::<ScalarMode>().unwrap(), m);
        }
        assert!("float:abc".parse::<ScalarMode>().is_err());
        assert_eq!(
            ScalarMode::default_float(10),
            ScalarMode::Float { bits: 464 }
        );
    }

    #[test]
    fn exact_rational_addition_is_error_free() {
        let a = parse_rational("1/3").unwrap();
        let b = parse_rational("2/7").unwrap();
        assert_eq!((a.clone() + b.clone()) - b, a);
    }

    #[test]
    fn families_reject_foreign_modes() {
        assert!(BigRational::context_for(ScalarMode::Float { bits: 64 }).is_err());
        assert!(<BigFloat as Scalar>::context_for(ScalarMode::Rational).is_err());
    }

    #[test]
    fn float_text_round_trips_bit_exactly() {
        let x = <BigFloat as Scalar>::from_rational(&parse_rational("22/7").unwrap(), &300);
        let t = x.to_text();
        assert_eq!(<BigFloat as Scalar>::from_text(&t, &300).unwrap(), x);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let q = parse_rational("3/2").unwrap();
        assert_eq!(q.powi(5), parse_rational("243/32").unwrap());
        assert_eq!(q.powi(0), BigRational::one());
    }

    #[test]
    fn zero_is_zero() {
        assert!(<BigRational as Zero>::zero().is_zero());
    }
}
