//! Binary floating point with a per-value precision.
//!
//! A value is `mant * 2^exp` with `|mant|` holding at most `prec` significant
//! bits, rounded to nearest with ties to even. The mantissa is kept odd (or
//! zero) so that equal values have equal representations.
//!
//! `prec == 0` marks an exact constant, which is what `zero()`, `one()` and
//! the other `num_traits` constructors produce: such a value is never rounded
//! and adopts the precision of whatever it is combined with. Combining two
//! values that carry different non-zero precisions panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Precision used when two exact constants must be divided.
const UNANCHORED_PREC: u32 = 64;

#[derive(Clone)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn combine_prec(a: u32, b: u32) -> u32 {
    match (a, b) {
        (0, p) | (p, 0) => p,
        (p, q) if p == q => p,
        (p, q) => panic!("mixed float precisions {p} and {q} in one computation"),
    }
}

/// Round `mag * 2^exp` to `prec` bits. `sticky` reports non-zero bits that
/// were already discarded below `mag`.
fn round_mag(mag: BigUint, exp: i64, prec: u32, sticky: bool) -> (BigUint, i64) {
    let bits = mag.bits();
    if prec == 0 || bits <= prec as u64 {
        debug_assert!(!sticky || prec == 0, "sticky bits without room to round");
        return (mag, exp);
    }
    let shift = bits - prec as u64;
    let mut q = &mag >> shift;
    let rem = &mag - (&q << shift);
    let half = BigUint::one() << (shift - 1);
    let up = match rem.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => sticky || q.is_odd(),
    };
    if up {
        q += 1u32;
    }
    (q, exp + shift as i64)
}

impl BigFloat {
    fn from_parts(sign: Sign, mag: BigUint, exp: i64, prec: u32, sticky: bool) -> Self {
        let (mag, exp) = round_mag(mag, exp, prec, sticky);
        let mut out = BigFloat {
            mant: BigInt::from_biguint(sign, mag),
            exp,
            prec,
        };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero_with_prec(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Round (or re-tag) to a new precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude().clone());
        BigFloat::from_parts(sign, mag, self.exp, prec, false)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        BigFloat::from_parts(n.sign(), n.magnitude().clone(), 0, prec, false)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = BigFloat::from_bigint(r.numer(), 0);
        let den = BigFloat::from_bigint(r.denom(), 0);
        if r.denom().is_one() {
            return num.with_precision(prec);
        }
        let prec = if prec == 0 { UNANCHORED_PREC } else { prec };
        num.div_prec(&den, prec)
    }

    /// Exact binary expansion of a finite `f64`.
    pub fn from_f64(x: f64, prec: u32) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(BigFloat::zero_with_prec(prec));
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(BigFloat::from_parts(sign, BigUint::from(m), e, prec, false))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn is_negative_value(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    /// Position of the leading bit: `|x|` lies in `[2^(top-1), 2^top)`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn log2_abs(&self) -> f64 {
        if self.mant.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let keep = bits.min(60);
        let head = (self.mant.magnitude() >> (bits - keep))
            .to_u64()
            .unwrap_or(0) as f64;
        head.log2() + (self.exp + (bits - keep) as i64) as f64
    }

    pub fn to_f64_value(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let keep = bits.min(64);
        let head = (self.mant.magnitude() >> (bits - keep))
            .to_u64()
            .unwrap_or(0) as f64;
        let e = self.exp + (bits - keep) as i64;
        let v = ldexp(head, e);
        if self.is_negative_value() {
            -v
        } else {
            v
        }
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let prec = combine_prec(self.prec, other.prec);
        let other_mant = if negate_other {
            -other.mant.clone()
        } else {
            other.mant.clone()
        };
        if other_mant.is_zero() {
            return self.with_precision(prec);
        }
        if self.mant.is_zero() {
            let o = BigFloat {
                mant: other_mant,
                exp: other.exp,
                prec: 0,
            };
            return o.with_precision(prec);
        }
        if prec > 0 {
            // far-apart magnitudes: the smaller one is below a quarter ulp
            let (ta, tb) = (self.top(), other.top());
            if tb < ta - prec as i64 - 2 {
                return self.with_precision(prec);
            }
            if ta < tb - prec as i64 - 2 {
                let o = BigFloat {
                    mant: other_mant,
                    exp: other.exp,
                    prec: 0,
                };
                return o.with_precision(prec);
            }
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = other_mant << (other.exp - e) as usize;
        let s = a + b;
        BigFloat::from_parts(s.sign(), s.magnitude().clone(), e, prec, false)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let prec = combine_prec(self.prec, other.prec);
        let p = &self.mant * &other.mant;
        BigFloat::from_parts(
            p.sign(),
            p.magnitude().clone(),
            self.exp + other.exp,
            prec,
            false,
        )
    }

    fn div_prec(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.mant.is_zero(), "BigFloat division by zero");
        if self.mant.is_zero() {
            return BigFloat::zero_with_prec(prec);
        }
        let (ma, mb) = (self.mant.magnitude(), other.mant.magnitude());
        let want = prec as i64 + 2 + mb.bits() as i64 - ma.bits() as i64;
        let shift = want.max(0) as usize;
        let (q, r) = (ma << shift).div_rem(mb);
        let sign = if self.mant.sign() == other.mant.sign() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        BigFloat::from_parts(
            sign,
            q,
            self.exp - other.exp - shift as i64,
            prec,
            !r.is_zero(),
        )
    }

    fn div_impl(&self, other: &Self) -> Self {
        let mut prec = combine_prec(self.prec, other.prec);
        if prec == 0 {
            debug_assert!(false, "division of two unanchored BigFloat constants");
            prec = UNANCHORED_PREC;
        }
        self.div_prec(other, prec)
    }

    pub fn sqrt_value(&self) -> Self {
        assert!(
            !self.is_negative_value(),
            "square root of a negative BigFloat"
        );
        let prec = if self.prec == 0 {
            UNANCHORED_PREC
        } else {
            self.prec
        };
        if self.mant.is_zero() {
            return BigFloat::zero_with_prec(prec);
        }
        let m = self.mant.magnitude();
        let mut shift = (2 * (prec as i64 + 2) + 2 - m.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let n = m << shift as usize;
        let root = n.sqrt();
        let sticky = &root * &root != n;
        BigFloat::from_parts(Sign::Plus, root, (self.exp - shift) / 2, prec, sticky)
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.mant.magnitude() << (self.exp - e) as usize;
                let b = other.mant.magnitude() << (other.exp - e) as usize;
                a.cmp(&b)
            }
            o => o,
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }

    /// Multiply by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut out = self.clone();
        if !out.mant.is_zero() {
            out.exp += k;
        }
        out
    }

    /// Round to the nearest integer (ties away from zero).
    pub fn round_to_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as usize;
        }
        let sh = (-self.exp) as usize;
        let mag = self.mant.magnitude();
        let half = BigUint::one() << (sh - 1);
        let q = (mag + half) >> sh;
        BigInt::from_biguint(self.mant.sign(), q)
    }

    /// Hex-float text, e.g. `-0x1bp-3`. Exact and bit-for-bit reversible.
    pub fn to_hex(&self) -> String {
        if self.mant.is_zero() {
            return "0x0p+0".to_string();
        }
        let sign = if self.is_negative_value() { "-" } else { "" };
        format!(
            "{sign}0x{}p{}{}",
            self.mant.magnitude().to_str_radix(16),
            if self.exp >= 0 { "+" } else { "" },
            self.exp
        )
    }

    pub fn parse_hex(s: &str, prec: u32) -> Option<Self> {
        let t = s.trim();
        let (neg, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X"))?;
        let (m, e) = t.split_once(['p', 'P'])?;
        let mag = BigUint::parse_bytes(m.as_bytes(), 16)?;
        let exp: i64 = e.parse().ok()?;
        let sign = if mag.is_zero() {
            Sign::NoSign
        } else if neg {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let mut out = BigFloat {
            mant: BigInt::from_biguint(sign, mag),
            exp,
            prec: 0,
        };
        out.normalize();
        Some(out.with_precision(prec))
    }

    /// Decimal rendering with enough significant digits to identify the value
    /// at its precision.
    pub fn to_decimal(&self) -> String {
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let prec = if self.prec == 0 {
            self.mant.bits() as u32
        } else {
            self.prec
        };
        let digits = (prec as f64 * std::f64::consts::LOG10_2).ceil() as i64 + 1;
        let r = self.to_rational();
        let neg = r.is_negative();
        let r = r.abs();
        // decimal exponent estimate
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let scaled = |e10: i64| -> BigInt {
            let shift = digits - 1 - e10;
            let scaled = if shift >= 0 {
                &r * BigRational::from_integer(BigInt::from(10u32).pow(shift as u32))
            } else {
                &r / BigRational::from_integer(BigInt::from(10u32).pow((-shift) as u32))
            };
            scaled.round().to_integer()
        };
        let mut n = scaled(e10);
        let limit = BigInt::from(10u32).pow(digits as u32);
        if n >= limit {
            e10 += 1;
            n = scaled(e10);
        } else if n < BigInt::from(10u32).pow(digits as u32 - 1) {
            e10 -= 1;
            n = scaled(e10);
        }
        let s = n.to_str_radix(10);
        let s = s.trim_end_matches('0');
        let (head, tail) = s.split_at(1);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push_str(&format!("e{e10}"));
        }
        out
    }

    /// `pi` to `prec` bits (Machin's formula in fixed point).
    pub fn pi(prec: u32) -> Self {
        let w = prec as usize + 32;
        let one = BigInt::one() << w;
        let atan_inv = |x: u32| -> BigInt {
            let x2 = BigInt::from(x) * BigInt::from(x);
            let mut power = &one / BigInt::from(x);
            let mut sum = power.clone();
            let mut k = 1u32;
            loop {
                power = &power / &x2;
                if power.is_zero() {
                    break;
                }
                let term = &power / BigInt::from(2 * k + 1);
                if k % 2 == 1 {
                    sum -= term;
                } else {
                    sum += term;
                }
                k += 1;
            }
            sum
        };
        let pi_fixed: BigInt = atan_inv(5) * 16u32 - atan_inv(239) * 4u32;
        BigFloat::from_parts(
            Sign::Plus,
            pi_fixed.magnitude().clone(),
            -(w as i64),
            prec,
            true,
        )
    }

    /// `e^x` at the precision of `self`.
    pub fn exp_value(&self) -> Self {
        let prec = if self.prec == 0 {
            UNANCHORED_PREC
        } else {
            self.prec
        };
        if self.mant.is_zero() {
            return BigFloat::from_bigint(&BigInt::one(), prec);
        }
        let mag = self.log2_abs().max(0.0).ceil() as i64;
        let halvings = mag + 12;
        let work = prec + 48 + halvings as u32;
        let r = self.with_precision(work).mul_pow2(-halvings);
        let one = BigFloat::from_bigint(&BigInt::one(), work);
        let mut sum = one.clone();
        let mut term = one;
        let mut k = 1u32;
        loop {
            term = term
                .mul_impl(&r)
                .div_prec(&BigFloat::from_bigint(&BigInt::from(k), 0), work);
            if term.mant.is_zero() || term.top() < sum.top() - work as i64 - 2 {
                break;
            }
            sum = sum.add_impl(&term, false);
            k += 1;
        }
        for _ in 0..halvings {
            sum = sum.mul_impl(&sum);
        }
        sum.with_precision(prec)
    }

    /// `cos x` and `sin x` at the precision of `self`.
    pub fn cos_sin(&self) -> (Self, Self) {
        let prec = if self.prec == 0 {
            UNANCHORED_PREC
        } else {
            self.prec
        };
        let mag = self.log2_abs().max(0.0).ceil() as u32;
        let work = prec + 64 + mag;
        let x = self.with_precision(work);
        let two_pi = BigFloat::pi(work).mul_pow2(1);
        let k = x.div_prec(&two_pi, work).round_to_bigint();
        let r = x.add_impl(&two_pi.mul_impl(&BigFloat::from_bigint(&k, 0)), true);
        let r2 = r.mul_impl(&r);
        let one = BigFloat::from_bigint(&BigInt::one(), work);
        let mut cos = one.clone();
        let mut sin = r.clone();
        let mut ct = one;
        let mut st = r;
        let mut n = 1u64;
        loop {
            let c_den = BigFloat::from_bigint(&BigInt::from((2 * n - 1) * (2 * n)), 0);
            let s_den = BigFloat::from_bigint(&BigInt::from((2 * n) * (2 * n + 1)), 0);
            ct = -(ct.mul_impl(&r2).div_prec(&c_den, work));
            st = -(st.mul_impl(&r2).div_prec(&s_den, work));
            let small_c = ct.mant.is_zero() || ct.top() < -(work as i64) - 4;
            let small_s = st.mant.is_zero() || st.top() < -(work as i64) - 4;
            cos = cos.add_impl(&ct, false);
            sin = sin.add_impl(&st, false);
            if small_c && small_s {
                break;
            }
            n += 1;
        }
        (cos.with_precision(prec), sin.with_precision(prec))
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if e > 2200 {
        return f64::INFINITY;
    }
    if e < -2200 {
        return 0.0;
    }
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.to_hex(), self.prec)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && self.exp == other.exp
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat {
                let f: fn(&BigFloat, &BigFloat) -> BigFloat = $body;
                f(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: &'a BigFloat) -> BigFloat {
                let f: fn(&BigFloat, &BigFloat) -> BigFloat = $body;
                f(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.div_impl(b));
forward_binop!(Rem, rem, |a, b| {
    let prec = combine_prec(a.prec, b.prec);
    let prec = if prec == 0 { UNANCHORED_PREC } else { prec };
    let q = a.div_prec(b, prec + a.top().max(0) as u32);
    let t = q.to_rational().trunc().to_integer();
    a.add_impl(&b.mul_impl(&BigFloat::from_bigint(&t, 0)), true)
});

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(mut self) -> BigFloat {
        self.mant = -self.mant;
        self
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat::zero_with_prec(0)
    }
    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat::from_bigint(&BigInt::one(), 0)
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = num_bigint::ParseBigIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let n = BigInt::from_str_radix(s, radix)?;
        Ok(BigFloat::from_bigint(&n, 0))
    }
}

impl FromPrimitive for BigFloat {
    fn from_i64(n: i64) -> Option<Self> {
        Some(BigFloat::from_bigint(&BigInt::from(n), 0))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(BigFloat::from_bigint(&BigInt::from(n), 0))
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigFloat::from_f64(x, 0)
    }
}
