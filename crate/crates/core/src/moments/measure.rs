use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::{pushforward_to_curve, CurveSpec};
use crate::error::{Error, Result};
use crate::multiindex::{factorial, MultiIndex};
use crate::poly::MPoly;
use crate::scalar::Scalar;

use super::{apply_polynomial_weight, Exact, GrowthBound, MomentSequence, SupportHint};

/// One term `coeff * x^alpha` of a weight polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTerm {
    pub alpha: Vec<u32>,
    pub coeff: Exact,
}

/// Built-in measures with closed-form or finitely computable moments.
///
/// | variant | moments |
/// |---|---|
/// | `GaussianProduct{v}` | per axis `m_{2k} = (2k-1) v m_{2k-2}`, odd moments 0 |
/// | `Exponential1D` | `m_k = k!` |
/// | `LogNormal1D{s}` | `m_k = exp(k^2 s^2 / 2)` (float mode only) |
/// | `QLattice1D{q}` | `m_k = q^{k^2}` |
/// | `Atomic` | `sum_j w_j x_j^alpha` |
/// | `Product` | products of factor moments over the concatenated axes |
/// | `CurvePushforward` | `L_sigma(prod u_i^{alpha_i})` |
/// | `WeightedBy` | `L(x^alpha w)` of the base |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureDefinition {
    GaussianProduct {
        variances: Vec<Exact>,
    },
    #[serde(rename = "exponential_1d")]
    Exponential1D,
    #[serde(rename = "log_normal_1d")]
    LogNormal1D {
        s: Exact,
    },
    #[serde(rename = "q_lattice_1d")]
    QLattice1D {
        q: Exact,
    },
    Atomic {
        points: Vec<Vec<Exact>>,
        weights: Vec<Exact>,
    },
    Product {
        factors: Vec<MeasureDefinition>,
    },
    CurvePushforward {
        base_1d: Box<MeasureDefinition>,
        curve: CurveSpec,
    },
    WeightedBy {
        base: Box<MeasureDefinition>,
        weight: Vec<WeightTerm>,
    },
}

impl MeasureDefinition {
    /// Ambient dimension of the defined measure.
    pub fn dimension(&self) -> Result<usize> {
        Ok(match self {
            MeasureDefinition::GaussianProduct { variances } => variances.len(),
            MeasureDefinition::Exponential1D
            | MeasureDefinition::LogNormal1D { .. }
            | MeasureDefinition::QLattice1D { .. } => 1,
            MeasureDefinition::Atomic { points, .. } => points.first().map_or(0, Vec::len),
            MeasureDefinition::Product { factors } => factors
                .iter()
                .map(MeasureDefinition::dimension)
                .sum::<Result<usize>>()?,
            MeasureDefinition::CurvePushforward { curve, .. } => curve.resolve()?.dim(),
            MeasureDefinition::WeightedBy { base, .. } => base.dimension()?,
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match self {
            MeasureDefinition::GaussianProduct { variances } => {
                if variances.is_empty() {
                    return bad("a Gaussian product needs at least one variance");
                }
                if variances.iter().any(|v| !v.0.is_positive()) {
                    return bad("variances must be positive");
                }
            }
            MeasureDefinition::LogNormal1D { s } if !s.0.is_positive() => {
                return bad("log-normal s must be positive")
            }
            MeasureDefinition::QLattice1D { q } if q.0 <= BigRational::one() => {
                return bad("q must exceed 1")
            }
            MeasureDefinition::Atomic { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return bad("atomic measure needs one weight per point");
                }
                let d = points[0].len();
                if d == 0 || points.iter().any(|p| p.len() != d) {
                    return bad("atoms must share a positive dimension");
                }
                if weights.iter().any(|w| !w.0.is_positive()) {
                    return bad("weights must be positive");
                }
            }
            MeasureDefinition::Product { factors } if factors.is_empty() => {
                return bad("product needs at least one factor")
            }
            _ => {}
        }
        Ok(())
    }

    /// Support hint implied by the variant.
    pub fn support_hint<S: Scalar>(&self) -> SupportHint<S> {
        match self {
            MeasureDefinition::Exponential1D
            | MeasureDefinition::LogNormal1D { .. }
            | MeasureDefinition::QLattice1D { .. } => SupportHint::NonnegativeOrthant,
            MeasureDefinition::Atomic { points, .. }
                if points.iter().flatten().all(|x| !x.0.is_negative()) =>
            {
                SupportHint::NonnegativeOrthant
            }
            MeasureDefinition::Product { factors }
                if factors
                    .iter()
                    .all(|f| matches!(f.support_hint::<S>(), SupportHint::NonnegativeOrthant)) =>
            {
                SupportHint::NonnegativeOrthant
            }
            MeasureDefinition::CurvePushforward { curve, .. } => SupportHint::Curve(curve.name()),
            MeasureDefinition::WeightedBy { base, .. } => base.support_hint(),
            _ => SupportHint::FullSpace,
        }
    }

    /// Moment growth certificate where the closed form proves one.
    pub fn growth_bound(&self) -> Option<GrowthBound> {
        // upward nudge so f64 rounding never undercuts the true constant
        let up = |x: f64| x * (1.0 + 1e-12);
        match self {
            MeasureDefinition::GaussianProduct { variances } => Some(GrowthBound {
                scales: variances
                    .iter()
                    .map(|v| up((2.0 * to_f64(&v.0)).sqrt()))
                    .collect(),
                exponent: 0.5,
            }),
            MeasureDefinition::Exponential1D => Some(GrowthBound {
                scales: vec![1.0],
                exponent: 1.0,
            }),
            MeasureDefinition::Atomic { points, .. } => {
                let d = points[0].len();
                Some(GrowthBound {
                    scales: (0..d)
                        .map(|i| {
                            up(points
                                .iter()
                                .map(|p| to_f64(&p[i].0).abs())
                                .fold(0.0, f64::max))
                        })
                        .collect(),
                    exponent: 0.0,
                })
            }
            MeasureDefinition::Product { factors } => {
                let parts: Option<Vec<GrowthBound>> = factors
                    .iter()
                    .map(MeasureDefinition::growth_bound)
                    .collect();
                let parts = parts?;
                Some(GrowthBound {
                    scales: parts.iter().flat_map(|g| g.scales.clone()).collect(),
                    exponent: parts.iter().map(|g| g.exponent).fold(0.0, f64::max),
                })
            }
            _ => None,
        }
    }
}

fn to_f64(r: &BigRational) -> f64 {
    Scalar::to_f64(r)
}

fn rational_power(r: &BigRational, k: u64) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let numer = num_traits::pow::pow(r.numer().clone(), k as usize);
    let denom = num_traits::pow::pow(r.denom().clone(), k as usize);
    BigRational::new(numer, denom)
}

/// Exact 1D moments of a closed-form variant, `None` when not rational.
fn exact_1d(def: &MeasureDefinition, n: usize) -> Option<Vec<BigRational>> {
    match def {
        MeasureDefinition::Exponential1D => Some(
            (0..=n)
                .map(|k| BigRational::from_integer(factorial(k as u32)))
                .collect(),
        ),
        MeasureDefinition::QLattice1D { q } => Some(
            (0..=n)
                .map(|k| rational_power(&q.0, (k * k) as u64))
                .collect(),
        ),
        _ => None,
    }
}

fn gaussian_axis(v: &BigRational, n: usize) -> Vec<BigRational> {
    let mut m = vec![BigRational::zero(); n + 1];
    m[0] = BigRational::one();
    for k in (2..=n).step_by(2) {
        m[k] = &m[k - 2] * v * BigRational::from_integer(BigInt::from(k - 1));
    }
    m
}

/// Dense moments of `def` in dimension `dim` up to degree `n`.
pub fn generate_moments<S: Scalar>(
    def: &MeasureDefinition,
    dim: usize,
    n: usize,
    ctx: S::Context,
) -> Result<MomentSequence<S>> {
    def.validate()?;
    let actual = def.dimension()?;
    if actual != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: actual,
        });
    }
    let seq = generate_inner::<S>(def, n, &ctx)?;
    Ok(seq.with_growth_bound(def.growth_bound()))
}

fn generate_inner<S: Scalar>(
    def: &MeasureDefinition,
    n: usize,
    ctx: &S::Context,
) -> Result<MomentSequence<S>> {
    def.validate()?;
    let support = def.support_hint::<S>();
    match def {
        MeasureDefinition::GaussianProduct { variances } => {
            let axes: Vec<Vec<BigRational>> =
                variances.iter().map(|v| gaussian_axis(&v.0, n)).collect();
            MomentSequence::from_fn(variances.len(), n, ctx.clone(), support, |alpha| {
                let r = alpha
                    .exponents()
                    .iter()
                    .zip(&axes)
                    .fold(BigRational::one(), |acc, (&e, m)| acc * &m[e as usize]);
                S::from_rational(&r, ctx)
            })
        }
        MeasureDefinition::Exponential1D | MeasureDefinition::QLattice1D { .. } => {
            let m = exact_1d(def, n).expect("closed form");
            MomentSequence::from_rationals(&m, ctx.clone(), support)
        }
        MeasureDefinition::LogNormal1D { s } => {
            if S::is_exact() {
                return Err(Error::UnrepresentableInMode {
                    mode: S::mode(ctx).to_string(),
                    what: "log-normal moments exp(k^2 s^2 / 2) are irrational".into(),
                });
            }
            let half_s2 = &s.0 * &s.0 / BigRational::from_integer(2.into());
            let values = (0..=n)
                .map(|k| {
                    let e = &half_s2 * BigRational::from_integer(BigInt::from(k * k));
                    S::from_rational(&e, ctx).exp()
                })
                .collect();
            MomentSequence::from_values(values, ctx.clone(), support)
        }
        MeasureDefinition::Atomic { points, weights } => {
            let dim = points[0].len();
            MomentSequence::from_fn(dim, n, ctx.clone(), support, |alpha| {
                let r = points
                    .iter()
                    .zip(weights)
                    .fold(BigRational::zero(), |acc, (p, w)| {
                        let mono = p
                            .iter()
                            .zip(alpha.exponents())
                            .fold(w.0.clone(), |m, (x, &e)| m * rational_power(&x.0, e as u64));
                        acc + mono
                    });
                S::from_rational(&r, ctx)
            })
        }
        MeasureDefinition::Product { factors } => {
            let parts: Vec<MomentSequence<S>> = factors
                .iter()
                .map(|f| generate_inner::<S>(f, n, ctx))
                .collect::<Result<_>>()?;
            let dims: Vec<usize> = parts.iter().map(MomentSequence::dim).collect();
            let total: usize = dims.iter().sum();
            MomentSequence::from_fn(total, n, ctx.clone(), support, |alpha| {
                let mut offset = 0;
                let mut acc = S::from_int(1, ctx);
                for (part, &d) in parts.iter().zip(&dims) {
                    let sub = MultiIndex::new(alpha.exponents()[offset..offset + d].to_vec());
                    acc = acc * part.get(&sub).clone();
                    offset += d;
                }
                acc
            })
        }
        MeasureDefinition::CurvePushforward { base_1d, curve } => {
            let curve = curve.resolve()?;
            let base_degree = n * curve.max_component_degree();
            let sigma = generate_inner::<S>(base_1d, base_degree, ctx)?;
            if sigma.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    left: 1,
                    right: sigma.dim(),
                });
            }
            Ok(pushforward_to_curve(&sigma, &curve, n)?
                .curve_moments
                .with_support(support))
        }
        MeasureDefinition::WeightedBy { base, weight } => {
            let d = base.dimension()?;
            if let Some(t) = weight.iter().find(|t| t.alpha.len() != d) {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: t.alpha.len(),
                });
            }
            let w = MPoly::from_terms(
                d,
                weight.iter().map(|t| {
                    (
                        MultiIndex::new(t.alpha.clone()),
                        S::from_rational(&t.coeff.0, ctx),
                    )
                }),
            );
            let inner = generate_inner::<S>(base, n + w.degree(), ctx)?;
            apply_polynomial_weight(&inner, &w, None)
        }
    }
}
