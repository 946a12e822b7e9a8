//! Real polynomial curves `u: R -> R^d`, the catalog of classical examples,
//! and the transfer of 1D moment data onto them.
//!
//! Curves are defined over exact rationals; kernels convert coefficients into
//! the scalar mode of the moment data they are combined with.

mod io;
mod measure;
mod ramification;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::{MPoly, Poly};
use crate::scalar::{BigFloat, Scalar};

pub use io::{CurveFile, CurveSpec};
pub use measure::{
    christoffel_on_curve, lift_and_test, projection_bridge, pushforward_to_curve, CurveMeasure,
    LiftConfig,
};
pub(crate) use ramification::real_roots;
pub use ramification::{derive_ramification, Ramification};

type Q = BigRational;

/// A parametrized curve with ramification data.
///
/// `ramification` holds the parameters `G` at which `u` fails to be an
/// immersion or an injection; `weight` is a polynomial whose simple real
/// roots are exactly `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCurve {
    name: String,
    components: Vec<Poly<Q>>,
    implicit: Vec<MPoly<Q>>,
    ramification: Vec<Q>,
    weight: Poly<Q>,
}

/// Catalog entries: most carry a polynomial parametrization, the Kampyle of
/// Eudoxus only its implicit equation.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogCurve {
    Parametrized(PolynomialCurve),
    ImplicitOnly { name: String, implicit: MPoly<Q> },
}

pub const CATALOG_NAMES: [&str; 5] = [
    "parabola",
    "nodal_cubic",
    "ramphoid_quartic",
    "lhospital_quintic",
    "kampyle",
];

impl PolynomialCurve {
    /// Validate and build a curve.
    pub fn new(
        name: impl Into<String>,
        components: Vec<Poly<Q>>,
        implicit: Vec<MPoly<Q>>,
        ramification: Vec<Q>,
        weight: Poly<Q>,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |m: String| Err(Error::InvalidCurve(format!("{name}: {m}")));
        if components.is_empty() {
            return bad("no components".into());
        }
        if components.iter().all(|c| c.degree() == 0) {
            return bad("parametrization is constant".into());
        }
        for (k, f) in implicit.iter().enumerate() {
            if f.nvars() != components.len() {
                return bad(format!("implicit equation {k} has the wrong arity"));
            }
            if !f.compose_univariate(&components).is_zero() {
                return bad(format!(
                    "implicit equation {k} does not vanish on the curve"
                ));
            }
        }
        if weight.is_zero() {
            return bad("weight is zero".into());
        }
        if !weight.is_square_free() {
            return bad("weight has a repeated root".into());
        }
        let real_roots = weight.count_all_real_roots();
        if real_roots != ramification.len() {
            return bad(format!(
                "weight has {real_roots} real roots but {} ramification parameters",
                ramification.len()
            ));
        }
        let delta = Q::new(BigInt::one(), BigInt::one() << 200usize);
        for g in &ramification {
            let exact_root = weight.eval(g).is_zero();
            let isolated = weight.count_real_roots(&(g - &delta), &(g + &delta)) == 1;
            if !exact_root && !isolated {
                return bad(format!("weight does not vanish at {g}"));
            }
        }
        let mut sorted = ramification.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ramification.len() {
            return bad("repeated ramification parameter".into());
        }
        Ok(PolynomialCurve {
            name,
            components,
            implicit,
            ramification,
            weight,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly<Q>] {
        &self.components
    }

    pub fn implicit(&self) -> &[MPoly<Q>] {
        &self.implicit
    }

    pub fn ramification(&self) -> &[Q] {
        &self.ramification
    }

    pub fn weight(&self) -> &Poly<Q> {
        &self.weight
    }

    pub fn max_component_degree(&self) -> usize {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Components with coefficients injected into a scalar mode.
    pub fn components_in<S: Scalar>(&self, ctx: &S::Context) -> Vec<Poly<S>> {
        self.components.iter().map(|p| convert(p, ctx)).collect()
    }

    pub fn weight_in<S: Scalar>(&self, ctx: &S::Context) -> Poly<S> {
        convert(&self.weight, ctx)
    }

    /// `u(t)` for a complex parameter.
    pub fn eval_cx<S: Scalar>(
        &self,
        t: &crate::scalar::Cx<S>,
        ctx: &S::Context,
    ) -> Vec<crate::scalar::Cx<S>> {
        self.components_in::<S>(ctx)
            .iter()
            .map(|p| p.eval_cx(t))
            .collect()
    }
}

pub(crate) fn convert<S: Scalar>(p: &Poly<Q>, ctx: &S::Context) -> Poly<S> {
    Poly::new(
        p.coeffs()
            .iter()
            .map(|c| S::from_rational(c, ctx))
            .collect(),
    )
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn poly(coeffs: Vec<Q>) -> Poly<Q> {
    Poly::new(coeffs)
}

fn mpoly(terms: Vec<(Vec<u32>, Q)>) -> MPoly<Q> {
    MPoly::from_terms(2, terms.into_iter().map(|(a, c)| (MultiIndex::new(a), c)))
}

/// `5^{1/4}` to 256 bits.
fn fifth_root_quartic() -> Q {
    let five = BigFloat::from_rational(&qi(5), 256);
    five.sqrt_value().sqrt_value().to_rational()
}

/// Catalog lookup; `a` defaults to 1 for the families that take it.
pub fn catalog(name: &str, a: Option<Q>) -> Result<CatalogCurve> {
    let a = a.unwrap_or_else(Q::one);
    if !a.is_positive() {
        return Err(Error::InvalidParameter(
            "curve parameter a must be positive".into(),
        ));
    }
    let curve = match name {
        "parabola" => PolynomialCurve::new(
            name,
            vec![poly(vec![qi(0), qi(0), qi(1)]), poly(vec![qi(0), qi(1)])],
            // x - y^2
            vec![mpoly(vec![(vec![1, 0], qi(1)), (vec![0, 2], qi(-1))])],
            vec![],
            Poly::constant(qi(1)),
        )?,
        "nodal_cubic" => PolynomialCurve::new(
            name,
            vec![
                poly(vec![qi(-1), qi(0), qi(1)]),
                poly(vec![qi(0), qi(-1), qi(0), qi(1)]),
            ],
            // y^2 - x^3 - x^2
            vec![mpoly(vec![
                (vec![0, 2], qi(1)),
                (vec![3, 0], qi(-1)),
                (vec![2, 0], qi(-1)),
            ])],
            vec![qi(-1), qi(1)],
            poly(vec![qi(-1), qi(0), qi(1)]),
        )?,
        "ramphoid_quartic" => PolynomialCurve::new(
            name,
            vec![
                poly(vec![qi(0), qi(0), qi(0), qi(0), a.clone()]),
                poly(vec![qi(0), qi(0), a.clone(), a.clone()]),
            ],
            // y^4 - 2a x y^2 - 4a x^2 y - a x^3 + a^2 x^2
            vec![mpoly(vec![
                (vec![0, 4], qi(1)),
                (vec![1, 2], -qi(2) * &a),
                (vec![2, 1], -qi(4) * &a),
                (vec![3, 0], -a.clone()),
                (vec![2, 0], &a * &a),
            ])],
            vec![qi(0)],
            poly(vec![qi(0), qi(1)]),
        )?,
        "lhospital_quintic" => {
            let half = &a / qi(2);
            let quarter = &a / qi(4);
            let x = poly(vec![
                qi(0),
                half.clone(),
                qi(0),
                qi(0),
                qi(0),
                -&half / qi(5),
            ]);
            // (a/4)(1 + 2t^2 + t^4)
            let y = poly(vec![
                quarter.clone(),
                qi(0),
                qi(2) * &quarter,
                qi(0),
                quarter.clone(),
            ]);
            // 64 y^5 - a (25 x^2 + 20 y^2 - 20 a y + 4 a^2)^2
            let inner = mpoly(vec![
                (vec![2, 0], qi(25)),
                (vec![0, 2], qi(20)),
                (vec![0, 1], -qi(20) * &a),
                (vec![0, 0], qi(4) * &a * &a),
            ]);
            let eq = mpoly(vec![(vec![0, 5], qi(64))]).sub(&inner.pow(2).scale(&a));
            let g = fifth_root_quartic();
            PolynomialCurve::new(
                name,
                vec![x, y],
                vec![eq],
                vec![-g.clone(), g],
                poly(vec![qi(-5), qi(0), qi(0), qi(0), qi(1)]),
            )?
        }
        "kampyle" => {
            // x^4 - a^2 x^2 - a^2 y^2
            let a2 = &a * &a;
            return Ok(CatalogCurve::ImplicitOnly {
                name: name.into(),
                implicit: mpoly(vec![
                    (vec![4, 0], qi(1)),
                    (vec![2, 0], -a2.clone()),
                    (vec![0, 2], -a2),
                ]),
            });
        }
        other => return Err(Error::UnknownCurve(other.into())),
    };
    Ok(CatalogCurve::Parametrized(curve))
}

/// Catalog lookup restricted to parametrized curves.
pub fn catalog_curve(name: &str, a: Option<Q>) -> Result<PolynomialCurve> {
    match catalog(name, a)? {
        CatalogCurve::Parametrized(c) => Ok(c),
        CatalogCurve::ImplicitOnly { name, .. } => Err(Error::ImplicitOnlyCurve(name)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_implicit_equation_vanishes() {
        for a in [qi(1), Q::new(3.into(), 2.into())] {
            for name in CATALOG_NAMES {
                match catalog(name, Some(a.clone())).unwrap() {
                    CatalogCurve::Parametrized(c) => {
                        assert!(!c.implicit().is_empty(), "{name}");
                        for f in c.implicit() {
                            assert!(f.compose_univariate(c.components()).is_zero(), "{name}");
                        }
                    }
                    CatalogCurve::ImplicitOnly { name, .. } => assert_eq!(name, "kampyle"),
                }
            }
        }
    }

    #[test]
    fn nodal_cubic_identity_by_hand() {
        // (t^3 - t)^2 - (t^2 - 1)^2 ((t^2 - 1) + 1)
        let t = Poly::<Q>::t(&());
        let x = t.pow(2).sub(&Poly::constant(qi(1)));
        let y = t.pow(3).sub(&t);
        let lhs = y.pow(2).sub(&x.pow(2).mul(&x.add(&Poly::constant(qi(1)))));
        assert!(lhs.is_zero());
    }

    #[test]
    fn nodal_cubic_weight_descends_to_x_squared() {
        let c = catalog_curve("nodal_cubic", None).unwrap();
        let w2 = c.weight().pow(2);
        let x_sq = mpoly(vec![(vec![2, 0], qi(1))]);
        assert_eq!(x_sq.compose_univariate(c.components()), w2);
        assert_eq!(w2, poly(vec![qi(1), qi(0), qi(-2), qi(0), qi(1)]));
    }

    #[test]
    fn unknown_and_implicit_only() {
        assert!(matches!(
            catalog("lemniscate", None),
            Err(Error::UnknownCurve(_))
        ));
        assert!(matches!(
            catalog_curve("kampyle", None),
            Err(Error::ImplicitOnlyCurve(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_curves() {
        let t = poly(vec![qi(0), qi(1)]);
        let constant = PolynomialCurve::new(
            "c",
            vec![Poly::constant(qi(2))],
            vec![],
            vec![],
            Poly::constant(qi(1)),
        );
        assert!(constant.is_err());
        let wrong_eq = PolynomialCurve::new(
            "w",
            vec![t.clone(), t.clone()],
            vec![mpoly(vec![(vec![1, 0], qi(1))])],
            vec![],
            Poly::constant(qi(1)),
        );
        assert!(wrong_eq.is_err());
        let repeated = PolynomialCurve::new("r", vec![t.clone()], vec![], vec![qi(0)], t.pow(2));
        assert!(repeated.is_err());
        let missing = PolynomialCurve::new("m", vec![t.clone()], vec![], vec![], t.clone());
        assert!(missing.is_err());
    }

    #[test]
    fn weights_have_simple_roots_exactly_at_g() {
        for name in [
            "parabola",
            "nodal_cubic",
            "ramphoid_quartic",
            "lhospital_quintic",
        ] {
            let c = catalog_curve(name, None).unwrap();
            assert!(c.weight().is_square_free());
            assert_eq!(
                c.weight().count_all_real_roots(),
                c.ramification().len(),
                "{name}"
            );
        }
    }
}
