use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::curves::real_roots;
use crate::error::{Error, Result};
use crate::moments::{apply_linear_functional, MomentSequence};
use crate::poly::{MPoly, Poly};
use crate::scalar::Scalar;

type Q = BigRational;

/// `h(t) = t^2 + t + 1`.
pub fn default_h() -> Poly<Q> {
    Poly::from_ints(&[1, 1, 1], &())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthantResult<S: Scalar> {
    /// `sum_I L(tau_a H_I) - m_0`; positive is necessary for indeterminacy.
    pub slack: S,
    pub h: Poly<Q>,
    pub degree: usize,
}

/// Sign of `p` at one point inside every interval cut out by its real roots
/// (and `0` when only the half-line counts).
fn nonnegative(p: &Poly<Q>, half_line: bool) -> bool {
    if p.is_zero() {
        return true;
    }
    let mut cuts = real_roots(p, 64);
    if half_line {
        cuts.retain(|r| !Scalar::is_negative(r));
        cuts.insert(0, Q::zero());
    }
    let mut probes: Vec<Q> = cuts
        .windows(2)
        .map(|w| (&w[0] + &w[1]) / Q::from_integer(2.into()))
        .collect();
    match (cuts.first(), cuts.last()) {
        (Some(lo), Some(hi)) => {
            if !half_line {
                probes.push(lo - Q::one());
            }
            probes.push(hi + Q::one());
        }
        _ => probes.push(Q::zero()),
    }
    if half_line {
        probes.push(Q::zero());
    }
    probes.iter().all(|t| !Scalar::is_negative(&p.eval(t)))
}

/// `h >= 1` on `[0, inf)` and `h >= 0` on the line, decided from the real
/// roots of `h` and `h - 1`.
fn check_h(h: &Poly<Q>) -> Result<()> {
    if h.is_zero() {
        return Err(Error::InvalidH("h is the zero polynomial".into()));
    }
    if !nonnegative(h, false) {
        return Err(Error::InvalidH(
            "h takes negative values on the line".into(),
        ));
    }
    if !nonnegative(&h.sub(&Poly::constant(Q::one())), true) {
        return Err(Error::InvalidH("h drops below 1 on [0, inf)".into()));
    }
    Ok(())
}

/// Slack of the orthant criterion at the translation `a`.
///
/// Summing `H_I(x) = prod_j h(+-x_j)` over all sign patterns factors as
/// `prod_j (h(x_j) + h(-x_j))`, so the functional is applied once.
pub fn orthant_criterion<S: Scalar>(
    seq: &MomentSequence<S>,
    a: &[S],
    h: Option<&Poly<Q>>,
) -> Result<OrthantResult<S>> {
    let d = seq.dim();
    if a.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: a.len(),
        });
    }
    let h = h.cloned().unwrap_or_else(default_h);
    check_h(&h)?;
    let ctx = seq.ctx();
    let minus_t = Poly::new(vec![Q::zero(), -Q::one()]);
    let even = h.add(&h.compose(&minus_t));
    let even_s = Poly::new(
        even.coeffs()
            .iter()
            .map(|c| S::from_rational(c, ctx))
            .collect(),
    );
    let degree = even.degree() * d;
    if degree > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: degree,
            available: seq.max_degree(),
        });
    }
    let mut product = MPoly::constant(d, S::from_int(1, ctx));
    for (j, aj) in a.iter().enumerate() {
        // g(x_j - a_j)
        let shift = Poly::new(vec![-aj.in_context(ctx), S::from_int(1, ctx)]);
        product = product.mul(&MPoly::from_univariate(d, j, &even_s.compose(&shift)));
    }
    let slack = apply_linear_functional(seq, &product)? - seq.mass().clone();
    Ok(OrthantResult { slack, h, degree })
}
