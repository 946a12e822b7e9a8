use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{Exact, WeightTerm};
use crate::multiindex::MultiIndex;
use crate::poly::{MPoly, Poly};

use super::{catalog_curve, PolynomialCurve};

/// On-disk curve description. Coefficient arrays run from the constant term
/// up; implicit equations are lists of `{alpha, coeff}` terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(default = "default_name")]
    pub name: String,
    pub components: Vec<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub implicit: Vec<Vec<WeightTerm>>,
    #[serde(default)]
    pub ramification: Vec<Exact>,
    #[serde(default = "unit_weight")]
    pub weight: Vec<Exact>,
}

fn default_name() -> String {
    "custom".into()
}

fn unit_weight() -> Vec<Exact> {
    vec![Exact(BigRational::one())]
}

/// A curve named from the catalog or given explicitly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Catalog {
        catalog: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Exact>,
    },
    Explicit(CurveFile),
}

impl CurveSpec {
    pub fn resolve(&self) -> Result<PolynomialCurve> {
        match self {
            CurveSpec::Catalog { catalog, a } => {
                catalog_curve(catalog, a.as_ref().map(|e| e.0.clone()))
            }
            CurveSpec::Explicit(file) => file.to_curve(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            CurveSpec::Catalog { catalog, .. } => catalog.clone(),
            CurveSpec::Explicit(file) => file.name.clone(),
        }
    }
}

fn to_poly(c: &[Exact]) -> Poly<BigRational> {
    Poly::new(c.iter().map(|e| e.0.clone()).collect())
}

impl CurveFile {
    pub fn to_curve(&self) -> Result<PolynomialCurve> {
        let d = self.components.len();
        let implicit = self
            .implicit
            .iter()
            .map(|terms| {
                if let Some(t) = terms.iter().find(|t| t.alpha.len() != d) {
                    return Err(Error::DimensionMismatch {
                        left: d,
                        right: t.alpha.len(),
                    });
                }
                Ok(MPoly::from_terms(
                    d,
                    terms
                        .iter()
                        .map(|t| (MultiIndex::new(t.alpha.clone()), t.coeff.0.clone())),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        PolynomialCurve::new(
            self.name.clone(),
            self.components.iter().map(|c| to_poly(c)).collect(),
            implicit,
            self.ramification.iter().map(|e| e.0.clone()).collect(),
            to_poly(&self.weight),
        )
    }

    pub fn from_curve(curve: &PolynomialCurve) -> Self {
        let coeffs = |p: &Poly<BigRational>| p.coeffs().iter().cloned().map(Exact).collect();
        CurveFile {
            name: curve.name().to_string(),
            components: curve.components().iter().map(coeffs).collect(),
            implicit: curve
                .implicit()
                .iter()
                .map(|f| {
                    f.terms()
                        .map(|(a, c)| WeightTerm {
                            alpha: a.exponents().to_vec(),
                            coeff: Exact(c.clone()),
                        })
                        .collect()
                })
                .collect(),
            ramification: curve.ramification().iter().cloned().map(Exact).collect(),
            weight: coeffs(curve.weight()),
        }
    }
}
