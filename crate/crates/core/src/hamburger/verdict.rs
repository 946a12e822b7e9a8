use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{MomentSequence, SupportHint};
use crate::scalar::Scalar;

use super::carleman::DEFAULT_SLOPE_C;
use super::{
    admissibility_check, carleman, christoffel_chain, hankel, recurrence_from_moments, require_1d,
    stieltjes_convergents, weyl_disk, Admissibility,
};

/// Moment problem on the whole line or on the half-line `[0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Hamburger,
    Stieltjes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Determinate,
    Indeterminate,
    Inconclusive,
}

/// Logical strength of a piece of evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    /// Proves the indicated status.
    RigorousSufficient,
    /// Proves it in the limit; the finite-degree value is numerical evidence.
    LimitRigorousNumeric,
    /// A necessary condition only.
    NecessaryOnly,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub criterion: String,
    pub degree: usize,
    pub value: f64,
    /// Exact value when the computation is exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub sufficiency: Sufficiency,
    pub indicates: Option<Status>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub flavor: Flavor,
    pub evidence: Vec<Evidence>,
    /// Set whenever the status rests on finite-degree numerics.
    pub numeric: bool,
    pub warnings: Vec<String>,
}

impl Verdict {
    /// Status from evidence: determinate needs a rigorous determinate item
    /// and no limit-rigorous indeterminate one; indeterminate needs a
    /// limit-rigorous indeterminate item and nothing pointing the other way.
    pub fn synthesize(flavor: Flavor, evidence: Vec<Evidence>, float_mode: bool) -> Verdict {
        let has = |s: Sufficiency, st: Status| {
            evidence
                .iter()
                .any(|e| e.sufficiency == s && e.indicates == Some(st))
        };
        let rigorous_det = has(Sufficiency::RigorousSufficient, Status::Determinate);
        let limit_indet = has(Sufficiency::LimitRigorousNumeric, Status::Indeterminate)
            || has(Sufficiency::RigorousSufficient, Status::Indeterminate);
        let any_det = evidence.iter().any(|e| {
            e.indicates == Some(Status::Determinate)
                && matches!(
                    e.sufficiency,
                    Sufficiency::RigorousSufficient | Sufficiency::LimitRigorousNumeric
                )
        });
        let mut warnings = Vec::new();
        let status = if rigorous_det && !limit_indet {
            Status::Determinate
        } else if limit_indet && !any_det {
            Status::Indeterminate
        } else {
            if rigorous_det && limit_indet {
                warnings.push("rigorous determinacy evidence conflicts with a plateau".into());
            }
            Status::Inconclusive
        };
        Verdict {
            numeric: status == Status::Indeterminate || float_mode,
            status,
            flavor,
            evidence,
            warnings,
        }
    }
}

/// Tunables of [`verdict_1d`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerdictConfig {
    /// Complex test point for the Christoffel and Weyl criteria.
    pub z: (BigRational, BigRational),
    /// Negative test point for the Stieltjes convergents.
    pub stieltjes_z: BigRational,
    /// Plateau threshold on `rho_n / rho_{n/2}` and on Weyl radii.
    pub plateau_ratio: f64,
    /// Plateau threshold on Stieltjes interval widths.
    pub width_ratio: f64,
    pub carleman_c: f64,
    /// Cap on the Hankel degree `n` used (moments through `2n`).
    pub degree: Option<usize>,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            z: (BigRational::zero(), BigRational::one()),
            stieltjes_z: -BigRational::one(),
            plateau_ratio: 0.9,
            width_ratio: 0.5,
            carleman_c: DEFAULT_SLOPE_C,
            degree: None,
        }
    }
}

const MIN_DEGREE: usize = 4;

fn exact_text<S: Scalar>(v: &S) -> Option<String> {
    S::is_exact().then(|| v.to_text())
}

fn ratio<S: Scalar>(top: &S, half: &S) -> (f64, Option<String>) {
    let value = (top.log2_abs() - half.log2_abs()).exp2();
    let exact = if S::is_exact() && !half.is_zero() {
        Some((top.clone() / half.clone()).to_text())
    } else {
        None
    };
    (value, exact)
}

/// Run every 1D criterion on `seq` and synthesize a status.
///
/// Fails only when the data admit no representing measure; failures of
/// individual criteria become evidence notes.
pub fn verdict_1d<S: Scalar>(
    seq: &MomentSequence<S>,
    flavor: Flavor,
    config: &VerdictConfig,
) -> Result<Verdict> {
    require_1d(seq)?;
    let ctx = seq.ctx().clone();
    let float_mode = !S::is_exact();
    let mut n = seq.max_degree() / 2;
    if let Some(cap) = config.degree {
        n = n.min(cap);
    }
    let mut evidence = Vec::new();
    let mut warnings = Vec::new();

    match admissibility_check(&hankel(seq, n)?)? {
        Admissibility::Indefinite => {
            return Err(Error::NotAdmissible(format!(
                "Hankel matrix of order {} is indefinite",
                n + 1
            )))
        }
        Admissibility::PositiveSemidefiniteRank(r) => {
            evidence.push(Evidence {
                criterion: "hankel_rank".into(),
                degree: 2 * n,
                value: r as f64,
                exact: Some(r.to_string()),
                sufficiency: Sufficiency::RigorousSufficient,
                indicates: Some(Status::Determinate),
                note: format!("singular Hankel matrix: the measure has exactly {r} atoms"),
            });
        }
        Admissibility::PositiveDefinite => evidence.push(Evidence {
            criterion: "hankel_positivity".into(),
            degree: 2 * n,
            value: 1.0,
            exact: None,
            sufficiency: Sufficiency::NecessaryOnly,
            indicates: None,
            note: "positive definite through the available degree".into(),
        }),
    }
    if evidence[0].criterion == "hankel_rank" {
        return Ok(Verdict::synthesize(flavor, evidence, float_mode));
    }
    if n < MIN_DEGREE {
        warnings.push(format!("degree {} is too low for plateau tests", 2 * n));
        let mut v = Verdict::synthesize(flavor, evidence, float_mode);
        v.status = Status::Inconclusive;
        v.numeric = float_mode;
        v.warnings.extend(warnings);
        return Ok(v);
    }

    let horizon = match flavor {
        Flavor::Hamburger => n,
        Flavor::Stieltjes => seq.max_degree(),
    };
    match carleman(seq, flavor, horizon, config.carleman_c) {
        Ok(c) => {
            let (sufficiency, indicates, note) = match (c.diverging, c.certified) {
                (true, true) => (
                    Sufficiency::RigorousSufficient,
                    Some(Status::Determinate),
                    "slope test fires and the growth bound forces divergence",
                ),
                (true, false) => (
                    Sufficiency::LimitRigorousNumeric,
                    Some(Status::Determinate),
                    "slope test fires at the horizon",
                ),
                (false, _) => (
                    Sufficiency::Heuristic,
                    None,
                    "terms decay faster than c/k; the test is silent",
                ),
            };
            evidence.push(Evidence {
                criterion: "carleman".into(),
                degree: horizon,
                value: c.partial_sum,
                exact: None,
                sufficiency,
                indicates,
                note: note.into(),
            });
        }
        Err(e) => warnings.push(format!("carleman: {e}")),
    }

    let indet_strength = match flavor {
        Flavor::Hamburger => Sufficiency::LimitRigorousNumeric,
        // Hamburger indeterminacy is only necessary for the half-line problem
        Flavor::Stieltjes => Sufficiency::NecessaryOnly,
    };
    let z = Complex::new(
        S::from_rational(&config.z.0, &ctx),
        S::from_rational(&config.z.1, &ctx),
    );
    let plateau = |criterion: &str, degree: usize, top: &S, half: &S, note: &str| {
        let (value, exact) = ratio(top, half);
        let flat = value > config.plateau_ratio;
        Evidence {
            criterion: criterion.into(),
            degree,
            value,
            exact,
            sufficiency: if flat {
                indet_strength
            } else {
                Sufficiency::Heuristic
            },
            indicates: Some(if flat {
                Status::Indeterminate
            } else {
                Status::Determinate
            }),
            note: format!("{note}; plateau threshold {}", config.plateau_ratio),
        }
    };
    match recurrence_from_moments(seq, n) {
        Ok(rec) => {
            match christoffel_chain(&rec, &z, n) {
                Ok(chain) => evidence.push(plateau(
                    "christoffel_plateau",
                    2 * n,
                    &chain[n],
                    &chain[n / 2],
                    &format!("rho_{n}(z) / rho_{}(z)", n / 2),
                )),
                Err(e) => warnings.push(format!("christoffel: {e}")),
            }
            let top = n - 1;
            let disks =
                weyl_disk(&rec, &z, top).and_then(|a| Ok((a, weyl_disk(&rec, &z, top / 2)?)));
            match disks {
                Ok((a, b)) => {
                    let mut e = plateau(
                        "weyl_radius_trend",
                        2 * top + 2,
                        &a.radius_sq,
                        &b.radius_sq,
                        &format!("(r_{top} / r_{})^2 of the Weyl disks", top / 2),
                    );
                    // compare radii, not their squares
                    e.value = e.value.sqrt();
                    e.exact = None;
                    let flat = e.value > config.plateau_ratio;
                    e.sufficiency = if flat {
                        indet_strength
                    } else {
                        Sufficiency::Heuristic
                    };
                    e.indicates = Some(if flat {
                        Status::Indeterminate
                    } else {
                        Status::Determinate
                    });
                    e.note = format!(
                        "r_{top} / r_{}; plateau threshold {}",
                        top / 2,
                        config.plateau_ratio
                    );
                    evidence.push(e);
                }
                Err(e) => warnings.push(format!("weyl: {e}")),
            }
        }
        Err(e) => warnings.push(format!("recurrence: {e}")),
    }

    if flavor == Flavor::Stieltjes {
        let half_line = seq.clone().with_support(SupportHint::NonnegativeOrthant);
        let w = S::from_rational(&config.stieltjes_z, &ctx);
        match stieltjes_convergents(&half_line, &w, n) {
            Ok(levels) => {
                let (top, half) = (&levels[n - 1], &levels[n / 2 - 1]);
                let (value, exact) = ratio(&top.width, &half.width);
                let flat = !top.width.is_zero() && value > config.width_ratio;
                evidence.push(Evidence {
                    criterion: "stieltjes_width_trend".into(),
                    degree: 2 * n,
                    value,
                    exact,
                    sufficiency: if flat {
                        Sufficiency::LimitRigorousNumeric
                    } else {
                        Sufficiency::Heuristic
                    },
                    indicates: Some(if flat { Status::Indeterminate } else { Status::Determinate }),
                    note: format!(
                        "width_{n} / width_{} = {}; threshold {}",
                        n / 2,
                        exact_text(&top.width).unwrap_or_else(|| top.width.to_decimal()),
                        config.width_ratio
                    ),
                });
            }
            Err(Error::NotStieltjesAdmissible { index }) => {
                return Err(Error::NotAdmissible(format!(
                    "no representing measure on the half-line (S-fraction coefficient {index} is negative)"
                )))
            }
            Err(e) => warnings.push(format!("stieltjes: {e}")),
        }
    }

    let mut v = Verdict::synthesize(flavor, evidence, float_mode);
    v.warnings.splice(0..0, warnings);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{generate_moments, Exact, MeasureDefinition};
    use crate::scalar::BigFloat;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn criterion<'a>(v: &'a Verdict, name: &str) -> &'a Evidence {
        v.evidence.iter().find(|e| e.criterion == name).unwrap()
    }

    #[test]
    fn gaussian_is_determinate() {
        let def = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1))],
        };
        let g = generate_moments::<Q>(&def, 1, 40, ()).unwrap();
        let v = verdict_1d(&g, Flavor::Hamburger, &VerdictConfig::default()).unwrap();
        assert_eq!(v.status, Status::Determinate);
        assert!(!v.numeric);
        assert_eq!(
            criterion(&v, "carleman").sufficiency,
            Sufficiency::RigorousSufficient
        );
        assert_eq!(
            criterion(&v, "christoffel_plateau").indicates,
            Some(Status::Determinate)
        );
    }

    #[test]
    fn gaussian_float_is_flagged_numeric() {
        let def = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1))],
        };
        let g = generate_moments::<BigFloat>(&def, 1, 40, 512).unwrap();
        let v = verdict_1d(&g, Flavor::Hamburger, &VerdictConfig::default()).unwrap();
        assert_eq!(v.status, Status::Determinate);
        assert!(v.numeric);
    }

    #[test]
    fn q_lattice_is_indeterminate() {
        let def = MeasureDefinition::QLattice1D { q: Exact(q(2)) };
        let l = generate_moments::<Q>(&def, 1, 30, ()).unwrap();
        let v = verdict_1d(&l, Flavor::Hamburger, &VerdictConfig::default()).unwrap();
        assert_eq!(v.status, Status::Indeterminate);
        assert!(v.numeric);
        let s = verdict_1d(&l, Flavor::Stieltjes, &VerdictConfig::default()).unwrap();
        assert_eq!(s.status, Status::Indeterminate);
        assert_eq!(
            criterion(&s, "christoffel_plateau").sufficiency,
            Sufficiency::NecessaryOnly
        );
    }

    #[test]
    fn indefinite_data_are_rejected() {
        let m = MomentSequence::from_values(vec![q(1), q(0), q(-1)], (), SupportHint::FullSpace)
            .unwrap();
        assert!(matches!(
            verdict_1d(&m, Flavor::Hamburger, &VerdictConfig::default()),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn atoms_are_rigorously_determinate() {
        let def = MeasureDefinition::Atomic {
            points: vec![vec![Exact(q(-1))], vec![Exact(q(2))]],
            weights: vec![Exact(q(1)), Exact(q(1))],
        };
        let a = generate_moments::<Q>(&def, 1, 10, ()).unwrap();
        let v = verdict_1d(&a, Flavor::Hamburger, &VerdictConfig::default()).unwrap();
        assert_eq!(v.status, Status::Determinate);
        assert_eq!(criterion(&v, "hankel_rank").value, 2.0);
    }

    #[test]
    fn low_degree_is_inconclusive() {
        let def = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1))],
        };
        let g = generate_moments::<Q>(&def, 1, 4, ()).unwrap();
        let v = verdict_1d(&g, Flavor::Hamburger, &VerdictConfig::default()).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert!(!v.warnings.is_empty());
    }

    #[test]
    fn synthesis_rules() {
        let item = |s, i| Evidence {
            criterion: "x".into(),
            degree: 0,
            value: 0.0,
            exact: None,
            sufficiency: s,
            indicates: Some(i),
            note: String::new(),
        };
        use Status::*;
        use Sufficiency::*;
        let v = |ev| Verdict::synthesize(Flavor::Hamburger, ev, false).status;
        assert_eq!(v(vec![item(RigorousSufficient, Determinate)]), Determinate);
        assert_eq!(
            v(vec![item(LimitRigorousNumeric, Indeterminate)]),
            Indeterminate
        );
        assert_eq!(
            v(vec![
                item(RigorousSufficient, Determinate),
                item(LimitRigorousNumeric, Indeterminate)
            ]),
            Inconclusive
        );
        assert_eq!(v(vec![item(Heuristic, Determinate)]), Inconclusive);
        assert_eq!(
            v(vec![
                item(Heuristic, Determinate),
                item(LimitRigorousNumeric, Indeterminate)
            ]),
            Indeterminate
        );
    }
}
