//! Truncated multivariate moment sequences and the operations that preserve
//! them (push-forward, marginals, convolution, weights, affine maps).

mod io;
mod measure;
mod ops;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{Scalar, ScalarMode};

pub use io::{peek_mode, Exact, MomentFile};
pub use measure::{generate_moments, MeasureDefinition, WeightTerm};
pub use ops::{
    affine_map, apply_linear_functional, apply_polynomial_weight, convolve, marginal,
    pushforward_direction, support_grid,
};

/// Where the represented measure is known (or assumed) to live.
///
/// Advisory metadata: it is never inferred from the entries.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportHint<S> {
    FullSpace,
    NonnegativeOrthant,
    /// Closed convex cone spanned by the given generators.
    Cone(Vec<Vec<S>>),
    /// Image of a named polynomial curve.
    Curve(String),
}

impl<S: Scalar> SupportHint<S> {
    /// Whether `xi` is strictly positive on the cone (dual interior).
    ///
    /// `tol` is a relative margin used in float mode only.
    pub fn dual_interior(&self, xi: &[S], tol: f64) -> bool {
        let strictly_positive = |v: S, scale: f64| {
            if S::is_exact() {
                v.is_positive()
            } else {
                v.is_positive() && v.to_f64() > tol * scale
            }
        };
        match self {
            SupportHint::NonnegativeOrthant => xi.iter().all(|x| strictly_positive(x.clone(), 1.0)),
            SupportHint::Cone(gens) => gens.iter().all(|g| {
                let dot = g
                    .iter()
                    .zip(xi)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
                let scale = g.iter().map(|v| v.to_f64().abs()).sum::<f64>()
                    * xi.iter().map(|v| v.to_f64().abs()).sum::<f64>();
                strictly_positive(dot, scale)
            }),
            _ => false,
        }
    }

    /// The orthant or a cone: a support for Stieltjes-type criteria.
    pub fn is_conic(&self) -> bool {
        matches!(self, SupportHint::NonnegativeOrthant | SupportHint::Cone(_))
    }
}

/// Moment growth certificate: `(E|x_i|^j)^{1/j} <= scales[i] * j^exponent` for
/// every `j >= 1`, expectations taken w.r.t. the measure normalized to unit
/// mass.
///
/// Attached by generators whose closed forms make the bound a theorem; it is
/// what upgrades a Carleman divergence flag from numeric to rigorous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub scales: Vec<f64>,
    pub exponent: f64,
}

impl GrowthBound {
    /// Check the bound against every even axis moment present in `seq`.
    pub fn consistent_with<S: Scalar>(&self, seq: &MomentSequence<S>) -> bool {
        if self.scales.len() != seq.dim() || !(self.exponent >= 0.0) {
            return false;
        }
        let log_m0 = seq.mass().log2_abs();
        for (i, &a) in self.scales.iter().enumerate() {
            if !(a >= 0.0) {
                return false;
            }
            for j in (2..=seq.max_degree()).step_by(2) {
                let m = &seq.entries[&MultiIndex::axis(seq.dim(), i, j as u32)];
                let lhs = (m.log2_abs() - log_m0) / j as f64;
                let rhs = a.log2() + self.exponent * (j as f64).log2();
                if lhs > rhs + 1e-9 {
                    return false;
                }
            }
        }
        true
    }
}

/// Dense truncated moment map `alpha -> m_alpha` for `|alpha| <= max_degree`.
///
/// Equality compares the data and the support hint; an attached growth
/// bound is metadata and does not take part.
#[derive(Clone, Debug)]
pub struct MomentSequence<S: Scalar> {
    dim: usize,
    max_degree: usize,
    ctx: S::Context,
    entries: BTreeMap<MultiIndex, S>,
    support: SupportHint<S>,
    growth: Option<GrowthBound>,
}

impl<S: Scalar> PartialEq for MomentSequence<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.max_degree == other.max_degree
            && self.ctx == other.ctx
            && self.support == other.support
            && self.entries == other.entries
    }
}

impl<S: Scalar> MomentSequence<S> {
    /// Validate and build a sequence: dense, positive mass, one scalar mode.
    pub fn new(
        dim: usize,
        max_degree: usize,
        ctx: S::Context,
        entries: BTreeMap<MultiIndex, S>,
        support: SupportHint<S>,
    ) -> Result<Self> {
        let seq = Self::raw(dim, max_degree, ctx, entries, support)?;
        if !seq.mass().is_positive() {
            return Err(Error::InvalidParameter(
                "total mass m_0 must be positive".into(),
            ));
        }
        Ok(seq)
    }

    /// Like [`new`](Self::new) but admits zero mass, which weighting can
    /// legitimately produce.
    pub(crate) fn raw(
        dim: usize,
        max_degree: usize,
        ctx: S::Context,
        mut entries: BTreeMap<MultiIndex, S>,
        support: SupportHint<S>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let expected = MultiIndex::up_to_degree(dim, max_degree);
        if entries.len() != expected.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for dimension {dim} and degree {max_degree}, got {}",
                expected.len(),
                entries.len()
            )));
        }
        for alpha in &expected {
            let v = entries
                .get_mut(alpha)
                .ok_or_else(|| Error::InvalidParameter(format!("missing moment for {alpha:?}")))?;
            if !v.fits_context(&ctx) {
                return Err(Error::ModeMismatch {
                    left: S::mode(&ctx).to_string(),
                    right: S::mode(&v.context()).to_string(),
                });
            }
            *v = v.in_context(&ctx);
        }
        if let SupportHint::Cone(gens) = &support {
            if gens.is_empty() || gens.iter().any(|g| g.len() != dim) {
                return Err(Error::InvalidParameter(
                    "cone generators must be d-vectors".into(),
                ));
            }
        }
        Ok(MomentSequence {
            dim,
            max_degree,
            ctx,
            entries,
            support,
            growth: None,
        })
    }

    /// The same moments in another arithmetic: exact values are rounded
    /// into a float context, floats convert to their exact dyadic values.
    pub fn convert<T: Scalar>(&self, ctx: T::Context) -> Result<MomentSequence<T>> {
        let conv = |v: &S| T::from_rational(&v.to_rational(), &ctx);
        let support = match &self.support {
            SupportHint::FullSpace => SupportHint::FullSpace,
            SupportHint::NonnegativeOrthant => SupportHint::NonnegativeOrthant,
            SupportHint::Cone(gens) => {
                SupportHint::Cone(gens.iter().map(|g| g.iter().map(conv).collect()).collect())
            }
            SupportHint::Curve(name) => SupportHint::Curve(name.clone()),
        };
        let entries = self
            .entries
            .iter()
            .map(|(a, v)| (a.clone(), conv(v)))
            .collect();
        let out =
            MomentSequence::<T>::raw(self.dim, self.max_degree, ctx.clone(), entries, support)?;
        Ok(out.with_growth_bound(self.growth.clone()))
    }

    /// Build from a closure over all indices of degree at most `max_degree`.
    pub fn from_fn(
        dim: usize,
        max_degree: usize,
        ctx: S::Context,
        support: SupportHint<S>,
        mut f: impl FnMut(&MultiIndex) -> S,
    ) -> Result<Self> {
        let entries = MultiIndex::up_to_degree(dim, max_degree)
            .into_iter()
            .map(|a| {
                let v = f(&a);
                (a, v)
            })
            .collect();
        Self::new(dim, max_degree, ctx, entries, support)
    }

    pub(crate) fn raw_from_fn(
        dim: usize,
        max_degree: usize,
        ctx: S::Context,
        support: SupportHint<S>,
        mut f: impl FnMut(&MultiIndex) -> S,
    ) -> Result<Self> {
        let entries = MultiIndex::up_to_degree(dim, max_degree)
            .into_iter()
            .map(|a| {
                let v = f(&a);
                (a, v)
            })
            .collect();
        Self::raw(dim, max_degree, ctx, entries, support)
    }

    /// One-dimensional sequence `(m_0, ..., m_N)`.
    pub fn from_values(values: Vec<S>, ctx: S::Context, support: SupportHint<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty moment list".into()));
        }
        let n = values.len() - 1;
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| (MultiIndex::new(vec![k as u32]), v))
            .collect();
        Self::new(1, n, ctx, entries, support)
    }

    /// Rational-valued convenience constructor for 1D data.
    pub fn from_rationals(
        values: &[num_rational::BigRational],
        ctx: S::Context,
        support: SupportHint<S>,
    ) -> Result<Self> {
        let v = values.iter().map(|r| S::from_rational(r, &ctx)).collect();
        Self::from_values(v, ctx, support)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn ctx(&self) -> &S::Context {
        &self.ctx
    }

    pub fn mode(&self) -> ScalarMode {
        S::mode(&self.ctx)
    }

    pub fn support(&self) -> &SupportHint<S> {
        &self.support
    }

    pub fn growth_bound(&self) -> Option<&GrowthBound> {
        self.growth.as_ref()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.entries.iter()
    }

    /// Total mass `m_0`.
    pub fn mass(&self) -> &S {
        &self.entries[&MultiIndex::zero(self.dim)]
    }

    pub fn moment(&self, alpha: &MultiIndex) -> Result<S> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: alpha.dim(),
            });
        }
        if alpha.degree() > self.max_degree {
            return Err(Error::DegreeInsufficient {
                needed: alpha.degree(),
                available: self.max_degree,
            });
        }
        Ok(self.entries[alpha].clone())
    }

    pub(crate) fn get(&self, alpha: &MultiIndex) -> &S {
        &self.entries[alpha]
    }

    /// `(m_0, ..., m_N)` of a one-dimensional sequence.
    pub fn values_1d(&self) -> Result<Vec<S>> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                left: 1,
                right: self.dim,
            });
        }
        Ok(self.entries.values().cloned().collect())
    }

    /// Drop every moment above degree `n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.max_degree {
            return Err(Error::DegreeInsufficient {
                needed: n,
                available: self.max_degree,
            });
        }
        let mut out = self.clone();
        out.entries.retain(|a, _| a.degree() <= n);
        out.max_degree = n;
        Ok(out)
    }

    pub fn with_support(mut self, support: SupportHint<S>) -> Self {
        self.support = support;
        self
    }

    pub fn with_growth_bound(mut self, growth: Option<GrowthBound>) -> Self {
        self.growth = growth;
        self
    }

    /// Whether two sequences can be combined: same dimension and context.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ModeMismatch {
                left: self.mode().to_string(),
                right: other.mode().to_string(),
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}
