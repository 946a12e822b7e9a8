//! Separating functions and the gaps they open: polynomial envelopes, grid
//! linear programs, Poisson gaps, the orthant and hyperplane criteria, and
//! direction scans.

mod envelope;
mod gap;
mod hyperplane;
mod orthant;
mod poisson;
mod scan;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{Exact, MomentSequence, SupportHint, WeightTerm};
use crate::multiindex::{factorial, MultiIndex};
use crate::poly::MPoly;
use crate::scalar::Scalar;

pub use envelope::{
    cm_gap_criterion, cosine_envelope, geometric_envelope, maclaurin_envelope, CmGap, Domain,
    PolynomialEnvelope, Trend,
};
pub use gap::{grid_gap_lp, GapEstimate, Grid};
pub use hyperplane::{hyperplane_gap, HyperplaneGap};
pub use orthant::{default_h, orthant_criterion, OrthantResult};
pub use poisson::{
    poisson_constant, poisson_kappa_1d, poisson_kappa_estimate, sphere_average_kappa, sphere_nodes,
    SphereAverage,
};
pub use scan::{direction_scan, DirectionVerdict, Scan};

type Q = BigRational;

/// Phase `eps` of `cos(x . xi + eps)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    #[default]
    Zero,
    MinusHalfPi,
}

/// A completely monotonic function on `[0, inf)`, known through its
/// MacLaurin coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CmFunction {
    /// `e^{-s}`
    NegExp,
    /// `1 / (1 + s)`
    Resolvent,
    /// `(1 + s)^{-k}`
    PowerDecay { k: u32 },
    /// Derivatives `phi^{(k)}(0)`, `k = 0, 1, ...`; no closed form.
    Custom { derivatives: Vec<Exact> },
}

impl CmFunction {
    /// `phi^{(k)}(0) / k!`, checked for the alternating sign pattern.
    pub fn taylor(&self, k: usize) -> Result<Q> {
        let c = match self {
            CmFunction::NegExp => Q::new(BigInt::one(), factorial(k as u32)),
            CmFunction::Resolvent => Q::one(),
            CmFunction::PowerDecay { k: p } => {
                if *p == 0 {
                    return Err(Error::InvalidParameter("power decay needs k >= 1".into()));
                }
                // binom(p + k - 1, k)
                let mut c = Q::one();
                for j in 0..k {
                    c = c * Q::from_integer(BigInt::from(*p as usize + j))
                        / Q::from_integer(BigInt::from(j + 1));
                }
                c
            }
            CmFunction::Custom { derivatives } => {
                let d = derivatives.get(k).ok_or(Error::DegreeInsufficient {
                    needed: k,
                    available: derivatives.len().saturating_sub(1),
                })?;
                let c = d.0.clone() / Q::from_integer(factorial(k as u32));
                let signed = if k.is_multiple_of(2) {
                    c.clone()
                } else {
                    -c.clone()
                };
                if Scalar::is_negative(&signed) {
                    return Err(Error::NotCompletelyMonotonicCoefficients { index: k });
                }
                return Ok(c);
            }
        };
        Ok(if k.is_multiple_of(2) { c } else { -c })
    }

    /// `phi(s)` for `s >= 0`; `None` when only coefficients are known.
    pub fn eval(&self, s: &Q) -> Option<Q> {
        match self {
            CmFunction::NegExp => Some(Scalar::exp(&-s.clone())),
            CmFunction::Resolvent => Some(Q::one() / (Q::one() + s)),
            CmFunction::PowerDecay { k } => Some(Q::one() / num_traits::Pow::pow(Q::one() + s, *k)),
            CmFunction::Custom { .. } => None,
        }
    }

    /// Whether `eval` is exact for rational arguments.
    pub fn is_rational(&self) -> bool {
        matches!(self, CmFunction::Resolvent | CmFunction::PowerDecay { .. })
    }
}

/// The separating function tested by a gap computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeparatingFunction {
    /// `cos(x . xi + eps)`
    Cosine {
        xi: Vec<Exact>,
        #[serde(default)]
        phase: Phase,
    },
    /// `1 / (a . x + 1)` on a cone, `a` interior to the dual cone.
    Fantappie { a: Vec<Exact> },
    /// `c_d t0 / (t0^2 + |x0 - x|^2)^{(d+1)/2}`
    PoissonKernel { x0: Vec<Exact>, t0: Exact },
    /// `phi(omega(x))` for a polynomial `omega >= 0` on the support.
    CompletelyMonotonic {
        phi: CmFunction,
        omega: Vec<WeightTerm>,
    },
    /// `Re 1 / (x - z)` in one variable.
    CauchyRe { z: [Exact; 2] },
    /// `Im 1 / (x - z)` in one variable.
    CauchyIm { z: [Exact; 2] },
    /// Values on a fixed point set; usable only on grids drawn from it.
    Sampled {
        points: Vec<Vec<Exact>>,
        values: Vec<Exact>,
    },
}

fn dot(a: &[Exact], x: &[Q]) -> Q {
    a.iter()
        .zip(x)
        .fold(Q::zero(), |acc, (ai, xi)| acc + &ai.0 * xi)
}

fn omega_poly(omega: &[WeightTerm], dim: usize) -> Result<MPoly<Q>> {
    if let Some(t) = omega.iter().find(|t| t.alpha.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: t.alpha.len(),
        });
    }
    Ok(MPoly::from_terms(
        dim,
        omega
            .iter()
            .map(|t| (MultiIndex::new(t.alpha.clone()), t.coeff.0.clone())),
    ))
}

impl SeparatingFunction {
    /// Number of variables, when the function fixes it.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SeparatingFunction::Cosine { xi, .. } => Some(xi.len()),
            SeparatingFunction::Fantappie { a } => Some(a.len()),
            SeparatingFunction::PoissonKernel { x0, .. } => Some(x0.len()),
            SeparatingFunction::CompletelyMonotonic { omega, .. } => {
                omega.first().map(|t| t.alpha.len())
            }
            SeparatingFunction::CauchyRe { .. } | SeparatingFunction::CauchyIm { .. } => Some(1),
            SeparatingFunction::Sampled { points, .. } => points.first().map(Vec::len),
        }
    }

    /// Structural checks against the sequence it will be tested on.
    pub fn validate<S: Scalar>(&self, seq: &MomentSequence<S>) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != seq.dim() {
                return Err(Error::DimensionMismatch {
                    left: seq.dim(),
                    right: d,
                });
            }
        }
        match self {
            SeparatingFunction::Fantappie { a } => {
                if !seq.support().is_conic() {
                    return Err(Error::WrongSupport(
                        "the Fantappie function needs a cone support hint".into(),
                    ));
                }
                let a: Vec<S> = a
                    .iter()
                    .map(|v| S::from_rational(&v.0, seq.ctx()))
                    .collect();
                if !seq.support().dual_interior(&a, 1e-12) {
                    return Err(Error::NotInteriorDirection(
                        "a must lie strictly inside the dual cone".into(),
                    ));
                }
            }
            SeparatingFunction::PoissonKernel { t0, .. } if !Scalar::is_positive(&t0.0) => {
                return Err(Error::InvalidParameter(
                    "Poisson kernel needs t0 > 0".into(),
                ));
            }
            SeparatingFunction::CauchyRe { z } | SeparatingFunction::CauchyIm { z }
                if z[1].0.is_zero() =>
            {
                return Err(Error::NonRealPointRequired);
            }
            SeparatingFunction::Sampled { points, values } if points.len() != values.len() => {
                return Err(Error::InvalidParameter(
                    "sampled points and values differ in length".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Value at a rational point; transcendental values are rounded to
    /// 256 bits.
    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        Ok(match self {
            SeparatingFunction::Cosine { xi, phase } => {
                let t = dot(xi, x);
                match phase {
                    Phase::Zero => Scalar::cos(&t),
                    // cos(t - pi/2) = sin t
                    Phase::MinusHalfPi => Scalar::sin(&t),
                }
            }
            SeparatingFunction::Fantappie { a } => {
                let den = dot(a, x) + Q::one();
                if !Scalar::is_positive(&den) {
                    return Err(Error::NotInteriorDirection(
                        "a . x + 1 must be positive on the grid".into(),
                    ));
                }
                Q::one() / den
            }
            SeparatingFunction::PoissonKernel { x0, t0 } => {
                let d = x0.len();
                let r2 = x0.iter().zip(x).fold(Q::zero(), |acc, (a, b)| {
                    let diff = &a.0 - b;
                    acc + &diff * &diff
                });
                let base = &t0.0 * &t0.0 + r2;
                // base^{(d+1)/2}
                let mut den = num_traits::Pow::pow(&base, d.div_ceil(2) as u32);
                if d % 2 == 0 {
                    den *= Scalar::sqrt(&base);
                }
                poisson_constant(d) * &t0.0 / den
            }
            SeparatingFunction::CompletelyMonotonic { phi, omega } => {
                let s = omega_poly(omega, x.len())?.eval(x);
                if Scalar::is_negative(&s) {
                    return Err(Error::NegativeWeightDetected {
                        at: format!("{x:?}"),
                    });
                }
                phi.eval(&s).ok_or_else(|| {
                    Error::InvalidParameter(
                        "a custom completely monotonic stream has no values".into(),
                    )
                })?
            }
            SeparatingFunction::CauchyRe { z } | SeparatingFunction::CauchyIm { z } => {
                // 1 / (x - z) = (x - a + i b) / ((x - a)^2 + b^2)
                let (a, b) = (&z[0].0, &z[1].0);
                let u = &x[0] - a;
                let den = &u * &u + b * b;
                if matches!(self, SeparatingFunction::CauchyRe { .. }) {
                    u / den
                } else {
                    b / den
                }
            }
            SeparatingFunction::Sampled { points, values } => {
                let i = points
                    .iter()
                    .position(|p| p.len() == x.len() && p.iter().zip(x).all(|(a, b)| &a.0 == b))
                    .ok_or_else(|| {
                        Error::InvalidParameter("grid point outside the sampled set".into())
                    })?;
                values[i].0.clone()
            }
        })
    }

    /// Whether `eval` is exact.
    pub fn is_rational(&self) -> bool {
        match self {
            SeparatingFunction::Fantappie { .. }
            | SeparatingFunction::CauchyRe { .. }
            | SeparatingFunction::CauchyIm { .. }
            | SeparatingFunction::Sampled { .. } => true,
            SeparatingFunction::CompletelyMonotonic { phi, .. } => phi.is_rational(),
            SeparatingFunction::Cosine { .. } | SeparatingFunction::PoissonKernel { .. } => false,
        }
    }
}

pub(crate) fn require_half_line<S: Scalar>(seq: &MomentSequence<S>) -> Result<()> {
    if seq.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: seq.dim(),
        });
    }
    match seq.support() {
        SupportHint::NonnegativeOrthant => Ok(()),
        _ => Err(Error::WrongSupport(
            "the envelope is valid on s >= 0 only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn cm_coefficients() {
        assert_eq!(
            CmFunction::NegExp.taylor(3).unwrap(),
            Q::new((-1).into(), 6.into())
        );
        assert_eq!(CmFunction::Resolvent.taylor(5).unwrap(), q(-1));
        // (1+s)^{-2} = 1 - 2s + 3s^2 - 4s^3
        let p = CmFunction::PowerDecay { k: 2 };
        let c: Vec<Q> = (0..4).map(|k| p.taylor(k).unwrap()).collect();
        assert_eq!(c, vec![q(1), q(-2), q(3), q(-4)]);
        let bad = CmFunction::Custom {
            derivatives: vec![Exact(q(1)), Exact(q(1))],
        };
        assert!(matches!(
            bad.taylor(1),
            Err(Error::NotCompletelyMonotonicCoefficients { index: 1 })
        ));
    }

    #[test]
    fn function_values() {
        let f = SeparatingFunction::Fantappie {
            a: vec![Exact(q(1)), Exact(q(2))],
        };
        assert_eq!(f.eval(&[q(1), q(1)]).unwrap(), Q::new(1.into(), 4.into()));
        let c = SeparatingFunction::CauchyIm {
            z: [Exact(q(0)), Exact(q(1))],
        };
        assert_eq!(c.eval(&[q(1)]).unwrap(), Q::new(1.into(), 2.into()));
        // c_1 t0 / (t0^2 + x^2) at x = 0, t0 = 1 is 1/pi
        let p = SeparatingFunction::PoissonKernel {
            x0: vec![Exact(q(0))],
            t0: Exact(q(1)),
        };
        assert!((p.eval(&[q(0)]).unwrap().to_f64() - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        let s = SeparatingFunction::Cosine {
            xi: vec![Exact(q(1))],
            phase: Phase::MinusHalfPi,
        };
        assert!((s.eval(&[q(1)]).unwrap().to_f64() - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn serde_shape() {
        let f: SeparatingFunction = serde_json::from_str(
            r#"{"kind": "completely_monotonic", "phi": {"family": "neg_exp"},
                "omega": [{"alpha": [1], "coeff": "1"}]}"#,
        )
        .unwrap();
        assert_eq!(f.eval(&[q(0)]).unwrap(), q(1));
    }
}
