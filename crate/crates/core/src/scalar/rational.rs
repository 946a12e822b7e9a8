use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{BigFloat, Scalar, ScalarMode, RATIONAL_APPROX_BITS};
use crate::error::{Error, Result};

/// Parse `p/q`, an integer, or a decimal (`-1.25`, `3e-4`) exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp10) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u32))
    } else {
        BigRational::new(n, ten.pow((-shift) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

fn approx(x: &BigRational) -> BigFloat {
    BigFloat::from_rational(x, RATIONAL_APPROX_BITS)
}

impl Scalar for BigRational {
    type Context = ();

    fn is_exact() -> bool {
        true
    }
    fn mode(_: &()) -> ScalarMode {
        ScalarMode::Rational
    }
    fn context_for(mode: ScalarMode) -> Result<()> {
        match mode {
            ScalarMode::Rational => Ok(()),
            other => Err(Error::ModeMismatch {
                left: "rational".into(),
                right: other.to_string(),
            }),
        }
    }
    fn context(&self) {}
    fn fits_context(&self, _: &()) -> bool {
        true
    }
    fn from_rational(r: &BigRational, _: &()) -> Self {
        r.clone()
    }
    fn from_f64(x: f64, _: &()) -> Self {
        BigFloat::from_f64(x, 0).expect("finite f64").to_rational()
    }
    fn to_f64(&self) -> f64 {
        let l = self.log2_abs();
        if l == f64::NEG_INFINITY {
            return 0.0;
        }
        if l.abs() < 1000.0 {
            return approx(self).to_f64_value();
        }
        let v = 2f64.powf(l);
        if Signed::is_negative(self) {
            -v
        } else {
            v
        }
    }
    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = BigFloat::from_bigint(self.numer(), 0);
        let d = BigFloat::from_bigint(self.denom(), 0);
        n.log2_abs() - d.log2_abs()
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn in_context(&self, _: &()) -> Self {
        self.clone()
    }
    fn shadow_context(_: &()) -> Option<()> {
        None
    }
    fn sqrt(&self) -> Self {
        assert!(
            !Signed::is_negative(self),
            "square root of a negative rational"
        );
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            return BigRational::new(rn, rd);
        }
        approx(self).sqrt_value().to_rational()
    }
    fn pi(_: &()) -> Self {
        BigFloat::pi(RATIONAL_APPROX_BITS).to_rational()
    }
    fn exp(&self) -> Self {
        if self.is_zero() {
            return BigRational::one();
        }
        approx(self).exp_value().to_rational()
    }
    fn cos(&self) -> Self {
        if self.is_zero() {
            return BigRational::one();
        }
        approx(self).cos_sin().0.to_rational()
    }
    fn sin(&self) -> Self {
        if self.is_zero() {
            return BigRational::zero();
        }
        approx(self).cos_sin().1.to_rational()
    }
    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn from_text(s: &str, _: &()) -> Result<Self> {
        if s.contains("0x") || s.contains("0X") {
            return BigFloat::parse_hex(s, 0)
                .map(|f| f.to_rational())
                .ok_or_else(|| Error::Parse(format!("bad hex-float `{s}`")));
        }
        parse_rational(s)
    }
    fn to_decimal(&self) -> String {
        if self.denom().is_one() {
            return self.numer().to_string();
        }
        approx(self).to_decimal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(
            parse_rational("3/6").unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            parse_rational("-1.25").unwrap(),
            BigRational::new((-5).into(), 4.into())
        );
        assert_eq!(
            parse_rational("2e3").unwrap(),
            BigRational::from_integer(2000.into())
        );
        assert_eq!(
            parse_rational("15e-1").unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn sqrt_is_exact_on_squares() {
        let x = parse_rational("9/16").unwrap();
        assert_eq!(x.sqrt(), parse_rational("3/4").unwrap());
        let two = parse_rational("2").unwrap().sqrt();
        assert!((two.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn huge_values_keep_finite_logs() {
        let big = BigRational::from_integer(BigInt::one() << 40000usize);
        assert_eq!(big.log2_abs(), 40000.0);
        assert_eq!(big.to_f64(), f64::INFINITY);
    }

    #[test]
    fn text_round_trip() {
        let x = parse_rational("-22/7").unwrap();
        assert_eq!(BigRational::from_text(&x.to_text(), &()).unwrap(), x);
    }
}
