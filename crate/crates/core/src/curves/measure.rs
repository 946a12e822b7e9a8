use crate::error::{Error, Result};
use crate::hamburger::{
    admissibility_check, christoffel, hankel, recurrence_from_moments, verdict_1d, Admissibility,
    Evidence, Flavor, Sufficiency, Verdict, VerdictConfig,
};
use crate::moments::{apply_polynomial_weight, GrowthBound, MomentSequence, SupportHint};
use crate::multiindex::MultiIndex;
use crate::poly::{MPoly, Poly};
use crate::scalar::{Cx, Scalar};

use super::PolynomialCurve;

/// A measure on a curve given as the image `u_* sigma` of a measure on
/// the line, kept together with its lift.
#[derive(Clone, Debug)]
pub struct CurveMeasure<S: Scalar> {
    pub curve: PolynomialCurve,
    pub lifted_1d: MomentSequence<S>,
    pub curve_moments: MomentSequence<S>,
}

impl<S: Scalar> CurveMeasure<S> {
    /// `w^e sigma`, the lift reweighted by the ramification weight.
    pub fn weighted_lift(&self, exponent: u32) -> Result<MomentSequence<S>> {
        let ctx = self.lifted_1d.ctx();
        let w = self.curve.weight_in::<S>(ctx).pow(exponent);
        if w.degree() == 0 && w.coeff(0) == S::from_int(1, ctx) {
            return Ok(self.lifted_1d.clone());
        }
        apply_polynomial_weight(&self.lifted_1d, &MPoly::from_univariate(1, 0, &w), None)
    }
}

/// Curve moments `L_sigma(prod_i u_i^{alpha_i})` for `|alpha| <= n`.
pub fn pushforward_to_curve<S: Scalar>(
    sigma: &MomentSequence<S>,
    curve: &PolynomialCurve,
    n: usize,
) -> Result<CurveMeasure<S>> {
    crate::hamburger::require_1d(sigma)?;
    let needed = n * curve.max_component_degree();
    if needed > sigma.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed,
            available: sigma.max_degree(),
        });
    }
    let ctx = sigma.ctx().clone();
    let m = sigma.values_1d()?;
    let components = curve.components_in::<S>(&ctx);
    // powers[i][k] = u_i^k
    let powers: Vec<Vec<Poly<S>>> = components
        .iter()
        .map(|u| {
            let mut v = vec![Poly::one(&ctx)];
            for k in 1..=n {
                let next = v[k - 1].mul(u);
                v.push(next);
            }
            v
        })
        .collect();
    let integrate = |p: &Poly<S>| {
        p.coeffs()
            .iter()
            .zip(&m)
            .fold(S::from_int(0, &ctx), |acc, (c, mk)| {
                acc + c.clone() * mk.clone()
            })
    };
    let curve_moments = MomentSequence::from_fn(
        curve.dim(),
        n,
        ctx.clone(),
        SupportHint::Curve(curve.name().to_string()),
        |alpha: &MultiIndex| {
            let p = alpha
                .exponents()
                .iter()
                .enumerate()
                .fold(Poly::one(&ctx), |acc, (i, &e)| {
                    acc.mul(&powers[i][e as usize])
                });
            integrate(&p)
        },
    )?;
    Ok(CurveMeasure {
        curve: curve.clone(),
        lifted_1d: sigma.clone(),
        curve_moments,
    })
}

/// Image of `sigma` under `t -> t^2`: `m_k = m_{2k}(sigma)` on the
/// half-line, the x-axis projection of the parabola push-forward.
pub fn projection_bridge<S: Scalar>(
    sigma: &MomentSequence<S>,
    n: usize,
) -> Result<MomentSequence<S>> {
    crate::hamburger::require_1d(sigma)?;
    if 2 * n > sigma.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: 2 * n,
            available: sigma.max_degree(),
        });
    }
    let m = sigma.values_1d()?;
    let out = MomentSequence::from_values(
        (0..=n).map(|k| m[2 * k].clone()).collect(),
        sigma.ctx().clone(),
        SupportHint::NonnegativeOrthant,
    )?;
    // ||t^2||_j = ||t||_{2j}^2 <= (A (2j)^p)^2
    let growth = sigma.growth_bound().map(|g| GrowthBound {
        scales: vec![g.scales[0] * g.scales[0] * 4f64.powf(g.exponent)],
        exponent: 2.0 * g.exponent,
    });
    Ok(out.with_growth_bound(growth))
}

/// Settings for [`lift_and_test`].
#[derive(Clone, Debug, PartialEq)]
pub struct LiftConfig {
    /// Power of the ramification weight applied to the lift.
    pub weight_exponent: u32,
    pub flavor: Flavor,
    pub verdict: VerdictConfig,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig {
            weight_exponent: 2,
            flavor: Flavor::Hamburger,
            verdict: VerdictConfig::default(),
        }
    }
}

fn hankel_rank<S: Scalar>(seq: &MomentSequence<S>) -> Option<usize> {
    let h = hankel(seq, seq.max_degree() / 2).ok()?;
    match admissibility_check(&h).ok()? {
        Admissibility::PositiveSemidefiniteRank(r) => Some(r),
        _ => None,
    }
}

/// Curve verdict by descent to the line: the 1D verdict of `w^e sigma`.
///
/// Indeterminacy of the weighted lift is evidence of bounded analytic point
/// evaluations on the curve; the Christoffel value of the lift at the
/// configured point is attached as that evidence.
pub fn lift_and_test<S: Scalar>(cm: &CurveMeasure<S>, config: &LiftConfig) -> Result<Verdict> {
    let weighted = cm.weighted_lift(config.weight_exponent)?;
    let mut warnings = Vec::new();
    if let (Some(before), after) = (hankel_rank(&cm.lifted_1d), hankel_rank(&weighted)) {
        let after = after.unwrap_or(before);
        if after < before {
            warnings.push(format!(
                "AtomsOnRamification: {} atom(s) of the lift sit on the ramification locus of {}",
                before - after,
                cm.curve.name()
            ));
        }
    }
    if weighted.mass().is_zero() {
        return Err(Error::NotAdmissible(
            "the weighted lift is the zero measure: all mass sits on the ramification locus".into(),
        ));
    }
    let mut verdict = verdict_1d(&weighted, config.flavor, &config.verdict)?;
    let n = weighted.max_degree() / 2;
    let ctx = weighted.ctx().clone();
    let z = Cx::new(
        S::from_rational(&config.verdict.z.0, &ctx),
        S::from_rational(&config.verdict.z.1, &ctx),
    );
    if let Ok(rho) = recurrence_from_moments(&weighted, n).and_then(|rec| christoffel(&rec, &z, n))
    {
        let beta: Vec<String> = cm
            .curve
            .eval_cx(&z, &ctx)
            .iter()
            .map(|c| format!("{}{:+}i", c.re.to_f64(), c.im.to_f64()))
            .collect();
        verdict.evidence.push(Evidence {
            criterion: "bounded_point_evaluation".into(),
            degree: 2 * n,
            value: rho.to_f64(),
            exact: S::is_exact().then(|| rho.to_text()),
            sufficiency: Sufficiency::Heuristic,
            indicates: None,
            note: format!(
                "|p(beta)|^2 <= L(|p|^2) / rho at beta = u(z) = ({}) on {}",
                beta.join(", "),
                cm.curve.name()
            ),
        });
    }
    verdict.warnings.extend(warnings);
    Ok(verdict)
}

/// Christoffel value `rho_n(alpha)` of the `w^2`-weighted lift: the bound
/// on point evaluations at `beta = u(alpha)` transferred to the line.
pub fn christoffel_on_curve<S: Scalar>(cm: &CurveMeasure<S>, alpha: &Cx<S>, n: usize) -> Result<S> {
    let weighted = cm.weighted_lift(2)?;
    let rec = recurrence_from_moments(&weighted, n)?;
    christoffel(&rec, alpha, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::catalog_curve;
    use crate::hamburger::{christoffel as rho, Status};
    use crate::moments::{
        apply_linear_functional, generate_moments, marginal, Exact, MeasureDefinition,
    };
    use num_complex::Complex;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn gaussian(n: usize) -> MomentSequence<Q> {
        let def = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1))],
        };
        generate_moments(&def, 1, n, ()).unwrap()
    }

    fn q_lattice(n: usize) -> MomentSequence<Q> {
        generate_moments(&MeasureDefinition::QLattice1D { q: Exact(q(2)) }, 1, n, ()).unwrap()
    }

    fn at(cm: &CurveMeasure<Q>, e: &[u32]) -> Q {
        cm.curve_moments
            .moment(&MultiIndex::new(e.to_vec()))
            .unwrap()
    }

    #[test]
    fn gaussian_on_parabola_and_nodal_cubic() {
        let g = gaussian(12);
        let p = pushforward_to_curve(&g, &catalog_curve("parabola", None).unwrap(), 6).unwrap();
        assert_eq!(at(&p, &[1, 0]), q(1));
        assert_eq!(at(&p, &[0, 1]), q(0));
        assert_eq!(at(&p, &[2, 0]), q(3));
        let c = pushforward_to_curve(&g, &catalog_curve("nodal_cubic", None).unwrap(), 4).unwrap();
        assert_eq!(at(&c, &[1, 0]), q(0));
        assert!(matches!(
            pushforward_to_curve(&g, &catalog_curve("nodal_cubic", None).unwrap(), 5),
            Err(Error::DegreeInsufficient { .. })
        ));
    }

    #[test]
    fn dirac_lands_on_the_point() {
        let t0 = Q::new(3.into(), 2.into());
        let d = MomentSequence::from_values(
            (0..=12)
                .map(|k| num_traits::Pow::pow(&t0, k as u32))
                .collect(),
            (),
            SupportHint::FullSpace,
        )
        .unwrap();
        let curve = catalog_curve("ramphoid_quartic", None).unwrap();
        let cm = pushforward_to_curve(&d, &curve, 3).unwrap();
        let u: Vec<Q> = curve.components().iter().map(|p| p.eval(&t0)).collect();
        for (alpha, v) in cm.curve_moments.entries() {
            let e = alpha.exponents();
            let expect = num_traits::Pow::pow(&u[0], e[0]) * num_traits::Pow::pow(&u[1], e[1]);
            assert_eq!(v, &expect);
        }
    }

    #[test]
    fn bridge_examples() {
        let b = projection_bridge(&gaussian(20), 10).unwrap();
        let mut df = q(1);
        for k in 0..=10i64 {
            assert_eq!(b.values_1d().unwrap()[k as usize], df);
            df *= q(2 * k + 1);
        }
        assert!(b.growth_bound().unwrap().consistent_with(&b));
        let two = generate_moments::<Q>(
            &MeasureDefinition::Atomic {
                points: vec![vec![Exact(q(-1))], vec![Exact(q(1))]],
                weights: vec![Exact(Q::new(1.into(), 2.into())); 2],
            },
            1,
            8,
            (),
        )
        .unwrap();
        assert!(projection_bridge(&two, 4)
            .unwrap()
            .values_1d()
            .unwrap()
            .iter()
            .all(|m| *m == q(1)));
        let l = projection_bridge(&q_lattice(12), 6).unwrap();
        for (k, m) in l.values_1d().unwrap().iter().enumerate() {
            assert_eq!(*m, num_traits::Pow::pow(q(2), (4 * k * k) as u32));
        }
    }

    #[test]
    fn bridge_is_parabola_marginal() {
        let g = gaussian(20);
        let cm = pushforward_to_curve(&g, &catalog_curve("parabola", None).unwrap(), 10).unwrap();
        let x = marginal(&cm.curve_moments, &[0]).unwrap();
        assert_eq!(
            x.values_1d().unwrap(),
            projection_bridge(&g, 10).unwrap().values_1d().unwrap()
        );
    }

    #[test]
    fn weight_descends_to_x_squared_on_nodal_cubic() {
        let g = gaussian(16);
        let curve = catalog_curve("nodal_cubic", None).unwrap();
        let cm = pushforward_to_curve(&g, &curve, 5).unwrap();
        let weighted = cm.weighted_lift(2).unwrap();
        // f = x + y^2 + 1 on the curve; L_sigma((f o u) w^2) = L_mu(f x^2)
        let f = MPoly::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 0]), q(1)),
                (MultiIndex::new(vec![0, 2]), q(1)),
                (MultiIndex::new(vec![0, 0]), q(1)),
            ],
        );
        let x2 = MPoly::from_terms(2, [(MultiIndex::new(vec![2, 0]), q(1))]);
        let lhs = apply_linear_functional(&cm.curve_moments, &f.mul(&x2)).unwrap();
        let fu = f.compose_univariate(curve.components());
        let rhs = apply_linear_functional(&weighted, &MPoly::from_univariate(1, 0, &fu)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lift_verdicts() {
        let parabola = catalog_curve("parabola", None).unwrap();
        let cfg = LiftConfig::default();
        let l = pushforward_to_curve(&q_lattice(30), &parabola, 15).unwrap();
        assert_eq!(
            lift_and_test(&l, &cfg).unwrap().status,
            Status::Indeterminate
        );
        let g = pushforward_to_curve(&gaussian(40), &parabola, 20).unwrap();
        let v = lift_and_test(&g, &cfg).unwrap();
        assert_eq!(v.status, Status::Determinate);
        assert!(v
            .evidence
            .iter()
            .any(|e| e.criterion == "bounded_point_evaluation"));

        let nodal = catalog_curve("nodal_cubic", None).unwrap();
        let mut dirac = vec![q(0); 13];
        dirac[0] = q(1);
        let d = MomentSequence::from_values(dirac, (), SupportHint::FullSpace).unwrap();
        let v = lift_and_test(&pushforward_to_curve(&d, &nodal, 4).unwrap(), &cfg).unwrap();
        assert_eq!(v.status, Status::Determinate);
        assert!(v
            .warnings
            .iter()
            .all(|w| !w.contains("AtomsOnRamification")));
    }

    #[test]
    fn atoms_on_ramification_are_flagged() {
        let nodal = catalog_curve("nodal_cubic", None).unwrap();
        let a = generate_moments::<Q>(
            &MeasureDefinition::Atomic {
                points: vec![vec![Exact(q(1))], vec![Exact(q(0))], vec![Exact(q(2))]],
                weights: vec![Exact(q(1)); 3],
            },
            1,
            12,
            (),
        )
        .unwrap();
        let v = lift_and_test(
            &pushforward_to_curve(&a, &nodal, 4).unwrap(),
            &LiftConfig::default(),
        )
        .unwrap();
        assert!(v.warnings.iter().any(|w| w.contains("AtomsOnRamification")));
    }

    /// Oracle: `1 / (v^* H^{-1} v)` on explicitly weighted moments.
    fn gram_oracle(m: &[Q], z: &Cx<Q>, n: usize) -> Q {
        let size = n + 1;
        let mut a: Vec<Vec<Cx<Q>>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| Complex::new(m[i + j].clone(), q(0)))
                    .collect()
            })
            .collect();
        let mut v = Vec::new();
        let mut p = Complex::new(q(1), q(0));
        for _ in 0..size {
            v.push(p.conj());
            p *= z.clone();
        }
        let mut y = v.clone();
        for c in 0..size {
            for r in c + 1..size {
                let f = a[r][c].clone() / a[c][c].clone();
                for k in c..size {
                    let t = a[r][k].clone() - f.clone() * a[c][k].clone();
                    a[r][k] = t;
                }
                let t = y[r].clone() - f * y[c].clone();
                y[r] = t;
            }
        }
        for c in (0..size).rev() {
            let mut s = y[c].clone();
            for k in c + 1..size {
                s -= a[c][k].clone() * y[k].clone();
            }
            y[c] = s / a[c][c].clone();
        }
        let form = v
            .iter()
            .zip(&y)
            .fold(Complex::new(q(0), q(0)), |acc, (a, b)| {
                acc + a.conj() * b.clone()
            });
        q(1) / form.re
    }

    #[test]
    fn curve_christoffel_values() {
        let g = gaussian(24);
        let i = Complex::new(q(0), q(1));
        let parabola =
            pushforward_to_curve(&g, &catalog_curve("parabola", None).unwrap(), 12).unwrap();
        assert_eq!(christoffel_on_curve(&parabola, &i, 0).unwrap(), q(1));
        let rec = recurrence_from_moments(&g, 8).unwrap();
        assert_eq!(
            christoffel_on_curve(&parabola, &i, 8).unwrap(),
            rho(&rec, &i, 8).unwrap()
        );

        let nodal =
            pushforward_to_curve(&g, &catalog_curve("nodal_cubic", None).unwrap(), 8).unwrap();
        let m = g.values_1d().unwrap();
        // (t^2 - 1)^2 = t^4 - 2 t^2 + 1
        let w: Vec<Q> = (0..=20)
            .map(|k| &m[k + 4] - q(2) * &m[k + 2] + &m[k])
            .collect();
        assert_eq!(christoffel_on_curve(&nodal, &i, 0).unwrap(), w[0]);
        for n in [3, 6, 9] {
            assert_eq!(
                christoffel_on_curve(&nodal, &i, n).unwrap(),
                gram_oracle(&w, &i, n)
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn pushforward_is_functorial(
            coeffs in proptest::collection::vec(-5i64..=5, 6),
            name in proptest::sample::select(vec!["parabola", "nodal_cubic", "ramphoid_quartic"]),
        ) {
            let curve = catalog_curve(name, None).unwrap();
            let n = 3;
            let g = gaussian(n * curve.max_component_degree());
            let cm = pushforward_to_curve(&g, &curve, n).unwrap();
            let exps = [[0, 0], [1, 0], [0, 1], [2, 1], [1, 2], [0, 3]];
            let f = MPoly::from_terms(
                2,
                exps.iter().zip(&coeffs).map(|(e, &c)| (MultiIndex::new(e.to_vec()), q(c))),
            );
            let on_curve = apply_linear_functional(&cm.curve_moments, &f).unwrap();
            let fu = f.compose_univariate(curve.components());
            let on_line = apply_linear_functional(&g, &MPoly::from_univariate(1, 0, &fu)).unwrap();
            prop_assert_eq!(on_curve, on_line);
        }
    }
}
