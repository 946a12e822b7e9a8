use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{apply_linear_functional, MomentSequence};
use crate::multiindex::factorial;
use crate::poly::{MPoly, Poly};
use crate::scalar::{Scalar, ScalarMode};

use super::{require_half_line, CmFunction, Phase};

type Q = BigRational;

/// Where an envelope is claimed to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Line,
    HalfLine,
}

/// `lower <= phi <= upper` on the domain, with gap `L(upper - lower)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialEnvelope<S: Scalar> {
    pub lower: Poly<S>,
    pub upper: Poly<S>,
    pub domain: Domain,
    /// Degree of the bracketing power.
    pub order: usize,
    pub gap: S,
    /// Points at which the envelope was checked before being returned.
    pub checked_points: usize,
}

/// Long-run behaviour of a sequence of gap values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    Bounded,
    Growing,
}

/// `c_{2n} L(omega^{2n})` for `n = 1..=horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct CmGap<S: Scalar> {
    pub values: Vec<S>,
    pub inf_value: S,
    /// 1-based `n` attaining the infimum.
    pub argmin: usize,
    pub trend: Trend,
}

const CHECK_POINTS: usize = 1000;

fn check_points(domain: Domain) -> Vec<Q> {
    let mut pts = vec![Q::zero()];
    match domain {
        Domain::Line => {
            let half = CHECK_POINTS / 2;
            for i in 0..half {
                let t = (-8.0 + 16.0 * i as f64 / (half - 1) as f64).exp2();
                let q = Q::from_float(t).expect("finite");
                pts.push(-q.clone());
                pts.push(q);
            }
        }
        Domain::HalfLine => {
            for i in 0..CHECK_POINTS {
                let t = (-8.0 + 20.0 * i as f64 / (CHECK_POINTS - 1) as f64).exp2();
                pts.push(Q::from_float(t).expect("finite"));
            }
        }
    }
    pts
}

/// A rational polynomial over a common denominator, so evaluation at a
/// rational point is integer Horner plus one reduction.
struct ScaledPoly {
    num: Vec<BigInt>,
    den: BigInt,
}

impl ScaledPoly {
    fn new(p: &Poly<Q>) -> Self {
        let den = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |a, c| a.lcm(c.denom()));
        let num = p
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        ScaledPoly { num, den }
    }

    fn eval(&self, t: &Q) -> Q {
        let (a, b) = (t.numer(), t.denom());
        let mut acc = BigInt::zero();
        let mut b_pow = BigInt::one();
        for c in self.num.iter().rev() {
            acc = acc * a + c * &b_pow;
            b_pow *= b;
        }
        // b_pow is now b^(deg + 1).
        Q::new(acc * b, &self.den * b_pow)
    }
}

/// Checks `lower <= f <= upper` in exact arithmetic, allowing a relative
/// slack for the rounding of transcendental values and float coefficients.
fn verify<S: Scalar>(
    lower: &Poly<S>,
    upper: &Poly<S>,
    domain: Domain,
    f: impl Fn(&Q) -> Q,
    exact_f: bool,
    ctx: &S::Context,
) -> Result<usize> {
    let to_q = |p: &Poly<S>| {
        ScaledPoly::new(&Poly::new(
            p.coeffs().iter().map(Scalar::to_rational).collect(),
        ))
    };
    let (lo, up) = (to_q(lower), to_q(upper));
    let slack_bits = match S::mode(ctx) {
        ScalarMode::Rational if exact_f => None,
        ScalarMode::Rational => Some(200),
        ScalarMode::Float { bits } => Some(bits.saturating_sub(8).clamp(8, 200)),
    };
    let pts = check_points(domain);
    for t in &pts {
        let (l, u, v) = (lo.eval(t), up.eval(t), f(t));
        let tol = match slack_bits {
            None => Q::zero(),
            Some(b) => {
                let scale = [Q::one(), Scalar::abs(&l), Scalar::abs(&u)]
                    .into_iter()
                    .fold(Q::zero(), |a, x| if x > a { x } else { a });
                scale / Q::from_integer(num_bigint::BigInt::one() << b)
            }
        };
        if l > v.clone() + &tol || v > u + &tol {
            return Err(Error::InvalidParameter(format!(
                "envelope fails at t = {}",
                t.to_decimal()
            )));
        }
    }
    Ok(pts.len())
}

fn one_dim<S: Scalar>(seq: &MomentSequence<S>) -> Result<()> {
    if seq.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: seq.dim(),
        });
    }
    Ok(())
}

fn need_degree<S: Scalar>(seq: &MomentSequence<S>, needed: usize) -> Result<()> {
    if needed > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed,
            available: seq.max_degree(),
        });
    }
    Ok(())
}

fn linear_gap<S: Scalar>(seq: &MomentSequence<S>, lower: &Poly<S>, upper: &Poly<S>) -> Result<S> {
    apply_linear_functional(seq, &MPoly::from_univariate(1, 0, &upper.sub(lower)))
}

/// Taylor partial sum of `cos` through degree `2k`.
fn cos_taylor<S: Scalar>(k: usize, ctx: &S::Context) -> Poly<S> {
    let mut c = vec![S::from_int(0, ctx); 2 * k + 1];
    for j in 0..=k {
        let v = Q::new(
            if j % 2 == 0 { 1.into() } else { (-1).into() },
            factorial(2 * j as u32),
        );
        c[2 * j] = S::from_rational(&v, ctx);
    }
    Poly::new(c)
}

/// Taylor envelope of `cos(t + eps)` bracketing at `t^{2m}`; the gap is
/// `L((t + eps)^{2m}) / (2m)!`.
pub fn cosine_envelope<S: Scalar>(
    seq: &MomentSequence<S>,
    m: usize,
    phase: Phase,
) -> Result<PolynomialEnvelope<S>> {
    one_dim(seq)?;
    if m == 0 {
        return Err(Error::InvalidParameter(
            "cosine envelope order must be >= 1".into(),
        ));
    }
    need_degree(seq, 2 * m)?;
    let ctx = seq.ctx();
    let (t2m, t2m2) = (cos_taylor::<S>(m, ctx), cos_taylor::<S>(m - 1, ctx));
    let (mut lower, mut upper) = if m % 2 == 1 { (t2m, t2m2) } else { (t2m2, t2m) };
    if phase == Phase::MinusHalfPi {
        let half_pi = S::pi(ctx) / S::from_int(2, ctx);
        let shift = Poly::new(vec![-half_pi, S::from_int(1, ctx)]);
        lower = lower.compose(&shift);
        upper = upper.compose(&shift);
    }
    let f = |t: &Q| match phase {
        Phase::Zero => Scalar::cos(t),
        Phase::MinusHalfPi => Scalar::sin(t),
    };
    let checked_points = verify(&lower, &upper, Domain::Line, f, false, ctx)?;
    let gap = linear_gap(seq, &lower, &upper)?;
    Ok(PolynomialEnvelope {
        lower,
        upper,
        domain: Domain::Line,
        order: 2 * m,
        gap,
        checked_points,
    })
}

/// MacLaurin envelope `M_{2n-1} <= phi <= M_{2n}` on `s >= 0`.
pub fn maclaurin_envelope<S: Scalar>(
    phi: &CmFunction,
    seq: &MomentSequence<S>,
    n: usize,
) -> Result<PolynomialEnvelope<S>> {
    require_half_line(seq)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "MacLaurin envelope order must be >= 1".into(),
        ));
    }
    need_degree(seq, 2 * n)?;
    let ctx = seq.ctx();
    let coeffs = (0..=2 * n)
        .map(|k| phi.taylor(k))
        .collect::<Result<Vec<Q>>>()?;
    let c: Vec<S> = coeffs.iter().map(|v| S::from_rational(v, ctx)).collect();
    let lower = Poly::new(c[..2 * n].to_vec());
    let upper = Poly::new(c);
    let checked_points = match phi.eval(&Q::zero()) {
        Some(_) => verify(
            &lower,
            &upper,
            Domain::HalfLine,
            |s| phi.eval(s).expect("closed form"),
            phi.is_rational(),
            ctx,
        )?,
        None => 0,
    };
    let gap = linear_gap(seq, &lower, &upper)?;
    Ok(PolynomialEnvelope {
        lower,
        upper,
        domain: Domain::HalfLine,
        order: 2 * n,
        gap,
        checked_points,
    })
}

/// Partial sums of the geometric series for `1 / (1 + s)`; the gap is
/// exactly `m_{2n}`.
pub fn geometric_envelope<S: Scalar>(
    seq: &MomentSequence<S>,
    n: usize,
) -> Result<PolynomialEnvelope<S>> {
    maclaurin_envelope(&CmFunction::Resolvent, seq, n)
}

fn trend_of<S: Scalar>(values: &[S]) -> Trend {
    let (first, last) = (&values[0], &values[values.len() - 1]);
    if last.is_zero() {
        return Trend::Vanishing;
    }
    if first.is_zero() || values.len() == 1 {
        return Trend::Bounded;
    }
    let drift = last.log2_abs() - first.log2_abs();
    let tail = &values[values.len() * 2 / 3..];
    let settling = tail.windows(2).all(|w| w[1] <= w[0]);
    if drift < -10.0 && settling {
        Trend::Vanishing
    } else if drift > 1.0 {
        Trend::Growing
    } else {
        Trend::Bounded
    }
}

/// Remainder sizes `c_{2n} L(omega^{2n})` of the MacLaurin envelope of
/// `phi(omega(x))`, `omega >= 0` on the support.
pub fn cm_gap_criterion<S: Scalar>(
    phi: &CmFunction,
    seq: &MomentSequence<S>,
    omega: &MPoly<S>,
    horizon: usize,
) -> Result<CmGap<S>> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    if omega.nvars() != seq.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: omega.nvars(),
        });
    }
    need_degree(seq, 2 * horizon * omega.degree())?;
    let ctx = seq.ctx();
    let coeffs = (0..=2 * horizon)
        .map(|k| phi.taylor(k))
        .collect::<Result<Vec<Q>>>()?;
    let mut power = omega.pow(2);
    let step = power.clone();
    let mut values = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        if n > 1 {
            power = power.mul(&step);
        }
        let l = apply_linear_functional(seq, &power)?;
        values.push(S::from_rational(&coeffs[2 * n], ctx) * l);
    }
    let (argmin, inf_value) =
        values
            .iter()
            .enumerate()
            .fold((0, values[0].clone()), |(i, v), (j, w)| {
                if *w < v {
                    (j, w.clone())
                } else {
                    (i, v)
                }
            });
    Ok(CmGap {
        trend: trend_of(&values),
        values,
        inf_value,
        argmin: argmin + 1,
    })
}
