use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::MPoly;
use crate::scalar::Scalar;

use super::{GrowthBound, MomentSequence, SupportHint};

/// `L(p) = sum_alpha p_alpha m_alpha`.
pub fn apply_linear_functional<S: Scalar>(seq: &MomentSequence<S>, p: &MPoly<S>) -> Result<S> {
    if p.nvars() != seq.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: p.nvars(),
        });
    }
    if p.degree() > seq.max_degree() && !p.is_zero() {
        return Err(Error::DegreeInsufficient {
            needed: p.degree(),
            available: seq.max_degree(),
        });
    }
    let mut acc = S::from_int(0, seq.ctx());
    for (alpha, c) in p.terms() {
        acc = acc + c.clone() * seq.get(alpha).clone();
    }
    Ok(acc)
}

/// Moments `s_k = L((x . xi)^k)` of the push-forward under `x -> x . xi`,
/// for `k <= degree`.
pub fn pushforward_direction<S: Scalar>(
    seq: &MomentSequence<S>,
    xi: &[S],
    degree: usize,
) -> Result<MomentSequence<S>> {
    if xi.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: xi.len(),
        });
    }
    if xi.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidDirection("direction is zero".into()));
    }
    if degree > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: degree,
            available: seq.max_degree(),
        });
    }
    let ctx = seq.ctx().clone();
    let xi: Vec<S> = xi.iter().map(|x| x.in_context(&ctx)).collect();
    // powers[i][e] = xi_i^e
    let powers: Vec<Vec<S>> = xi
        .iter()
        .map(|x| {
            let mut v = vec![S::from_int(1, &ctx)];
            for e in 1..=degree {
                let next = v[e - 1].clone() * x.clone();
                v.push(next);
            }
            v
        })
        .collect();
    let mut values = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        let mut s = S::from_int(0, &ctx);
        for alpha in MultiIndex::of_degree(seq.dim(), k) {
            let mut term = S::from_bigint(&alpha.multinomial(), &ctx);
            for (i, &e) in alpha.exponents().iter().enumerate() {
                term = term * powers[i][e as usize].clone();
            }
            s = s + term * seq.get(&alpha).clone();
        }
        values.push(s);
    }
    let support = if seq.support().dual_interior(&xi, 0.0) {
        SupportHint::NonnegativeOrthant
    } else {
        SupportHint::FullSpace
    };
    let growth = seq.growth_bound().map(|g| GrowthBound {
        scales: vec![
            g.scales
                .iter()
                .zip(&xi)
                .map(|(a, x)| a * x.to_f64().abs())
                .sum::<f64>()
                * (1.0 + 1e-12),
        ],
        exponent: g.exponent,
    });
    Ok(MomentSequence::from_values(values, ctx, support)?.with_growth_bound(growth))
}

/// Marginal onto the given (0-based, strictly increasing) axes.
pub fn marginal<S: Scalar>(seq: &MomentSequence<S>, axes: &[usize]) -> Result<MomentSequence<S>> {
    if axes.is_empty() {
        return Err(Error::InvalidParameter(
            "marginal needs at least one axis".into(),
        ));
    }
    if axes.windows(2).any(|w| w[0] >= w[1]) || axes.iter().any(|&a| a >= seq.dim()) {
        return Err(Error::InvalidParameter(format!(
            "axes {axes:?} must be increasing and below {}",
            seq.dim()
        )));
    }
    let lift = |beta: &MultiIndex| {
        let mut v = vec![0u32; seq.dim()];
        for (j, &a) in axes.iter().enumerate() {
            v[a] = beta.exponents()[j];
        }
        MultiIndex::new(v)
    };
    let support = match seq.support() {
        SupportHint::NonnegativeOrthant => SupportHint::NonnegativeOrthant,
        SupportHint::Cone(gens) => SupportHint::Cone(
            gens.iter()
                .map(|g| axes.iter().map(|&a| g[a].clone()).collect())
                .collect(),
        ),
        _ => SupportHint::FullSpace,
    };
    let growth = seq.growth_bound().map(|g| GrowthBound {
        scales: axes.iter().map(|&a| g.scales[a]).collect(),
        exponent: g.exponent,
    });
    let out = MomentSequence::raw_from_fn(
        axes.len(),
        seq.max_degree(),
        seq.ctx().clone(),
        support,
        |beta| seq.get(&lift(beta)).clone(),
    )?;
    Ok(out.with_growth_bound(growth))
}

/// Moments of the convolution `a * b` up to the common degree.
pub fn convolve<S: Scalar>(
    a: &MomentSequence<S>,
    b: &MomentSequence<S>,
) -> Result<MomentSequence<S>> {
    a.check_compatible(b)?;
    let n = a.max_degree().min(b.max_degree());
    let ctx = a.ctx().clone();
    let support = match (a.support(), b.support()) {
        (SupportHint::NonnegativeOrthant, SupportHint::NonnegativeOrthant) => {
            SupportHint::NonnegativeOrthant
        }
        _ => SupportHint::FullSpace,
    };
    let growth = match (a.growth_bound(), b.growth_bound()) {
        (Some(ga), Some(gb)) => Some(GrowthBound {
            scales: ga
                .scales
                .iter()
                .zip(&gb.scales)
                .map(|(x, y)| x + y)
                .collect(),
            exponent: ga.exponent.max(gb.exponent),
        }),
        _ => None,
    };
    let out = MomentSequence::raw_from_fn(a.dim(), n, ctx.clone(), support, |gamma| {
        let mut acc = S::from_int(0, &ctx);
        for beta in gamma.divisors() {
            let rest = gamma.checked_sub(&beta).expect("divisor");
            let c = S::from_bigint(&gamma.binomial(&beta), &ctx);
            acc = acc + c * a.get(&beta).clone() * b.get(&rest).clone();
        }
        acc
    })?;
    Ok(out.with_growth_bound(growth))
}

/// Product grid on the support hint used to spot-check weight positivity:
/// `per_axis` points per coordinate spread over `[-radius, radius]`, or
/// `[0, radius]` on the orthant.
pub fn support_grid<S: Scalar>(
    seq: &MomentSequence<S>,
    per_axis: usize,
    radius: f64,
) -> Vec<Vec<S>> {
    let per_axis = per_axis.max(2);
    let lo = if matches!(seq.support(), SupportHint::NonnegativeOrthant) {
        0.0
    } else {
        -radius
    };
    let axis: Vec<S> = (0..per_axis)
        .map(|i| {
            let x = lo + (radius - lo) * i as f64 / (per_axis - 1) as f64;
            S::from_f64(x, seq.ctx())
        })
        .collect();
    let mut points = vec![Vec::new()];
    for _ in 0..seq.dim() {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    points
}

/// Moments of `w mu`: `m'_alpha = L(x^alpha w)`, degree `N - deg w`.
///
/// Nonnegativity of `w` is the caller's responsibility; when `check` points
/// are supplied, `w` is evaluated there and a negative value is an error.
pub fn apply_polynomial_weight<S: Scalar>(
    seq: &MomentSequence<S>,
    w: &MPoly<S>,
    check: Option<&[Vec<S>]>,
) -> Result<MomentSequence<S>> {
    if w.nvars() != seq.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: w.nvars(),
        });
    }
    let dw = w.degree();
    if dw > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: dw,
            available: seq.max_degree(),
        });
    }
    if let Some(points) = check {
        for p in points {
            if w.eval(p).is_negative() {
                let at: Vec<String> = p.iter().map(|x| x.to_decimal()).collect();
                return Err(Error::NegativeWeightDetected {
                    at: format!("({})", at.join(", ")),
                });
            }
        }
    }
    let ctx = seq.ctx().clone();
    MomentSequence::raw_from_fn(
        seq.dim(),
        seq.max_degree() - dw,
        ctx.clone(),
        seq.support().clone(),
        |alpha| {
            w.terms().fold(S::from_int(0, &ctx), |acc, (beta, c)| {
                acc + c.clone() * seq.get(&alpha.add(beta)).clone()
            })
        },
    )
}

/// Moments of the image measure under `x -> A x + b`, `A` given by rows.
pub fn affine_map<S: Scalar>(
    seq: &MomentSequence<S>,
    a: &[Vec<S>],
    b: &[S],
    out_degree: Option<usize>,
) -> Result<MomentSequence<S>> {
    let d_out = a.len();
    if d_out == 0 || b.len() != d_out {
        return Err(Error::InvalidParameter(
            "A and b must have matching row counts".into(),
        ));
    }
    if let Some(row) = a.iter().find(|r| r.len() != seq.dim()) {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: row.len(),
        });
    }
    let n = out_degree.unwrap_or(seq.max_degree());
    if n > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: n,
            available: seq.max_degree(),
        });
    }
    let ctx = seq.ctx().clone();
    let rows: Vec<MPoly<S>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let r: Vec<S> = r.iter().map(|x| x.in_context(&ctx)).collect();
            MPoly::affine_form(&r, bi.in_context(&ctx))
        })
        .collect();
    // Powers of each affine row, built once.
    let row_powers: Vec<Vec<MPoly<S>>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![MPoly::constant(seq.dim(), S::from_int(1, &ctx))];
            for e in 1..=n {
                let next = v[e - 1].mul(r);
                v.push(next);
            }
            v
        })
        .collect();
    let nonneg = |v: &S| !v.is_negative();
    let support = if matches!(seq.support(), SupportHint::NonnegativeOrthant)
        && a.iter().flatten().all(nonneg)
        && b.iter().all(nonneg)
    {
        SupportHint::NonnegativeOrthant
    } else {
        SupportHint::FullSpace
    };
    let growth = seq.growth_bound().map(|g| GrowthBound {
        scales: a
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                (r.iter()
                    .zip(&g.scales)
                    .map(|(x, s)| x.to_f64().abs() * s)
                    .sum::<f64>()
                    + bi.to_f64().abs())
                    * (1.0 + 1e-12)
            })
            .collect(),
        exponent: g.exponent,
    });
    let mut err = None;
    let out = MomentSequence::raw_from_fn(d_out, n, ctx.clone(), support, |beta| {
        let mut poly = MPoly::constant(seq.dim(), S::from_int(1, &ctx));
        for (i, &e) in beta.exponents().iter().enumerate() {
            if e > 0 {
                poly = poly.mul(&row_powers[i][e as usize]);
            }
        }
        match apply_linear_functional(seq, &poly) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                S::from_int(0, &ctx)
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(out.with_growth_bound(growth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{generate_moments, Exact, MeasureDefinition};
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn qr(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn gaussian(dim: usize, n: usize) -> MomentSequence<Q> {
        let def = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1)); dim],
        };
        generate_moments(&def, dim, n, ()).unwrap()
    }

    fn atoms(points: Vec<Vec<Q>>, weights: Vec<Q>, n: usize) -> MomentSequence<Q> {
        let dim = points[0].len();
        let def = MeasureDefinition::Atomic {
            points: points
                .into_iter()
                .map(|p| p.into_iter().map(Exact).collect())
                .collect(),
            weights: weights.into_iter().map(Exact).collect(),
        };
        generate_moments(&def, dim, n, ()).unwrap()
    }

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn functional_examples() {
        let g = gaussian(1, 4);
        assert_eq!(
            apply_linear_functional(&g, &MPoly::constant(1, q(1))).unwrap(),
            q(1)
        );
        let p = MPoly::from_terms(1, [(idx(&[2]), q(1)), (idx(&[0]), q(1))]);
        assert_eq!(apply_linear_functional(&g, &p).unwrap(), q(2));
        let dirac = atoms(vec![vec![q(0)]], vec![q(1)], 3);
        let p = MPoly::from_terms(1, [(idx(&[3]), q(1)), (idx(&[0]), q(-7))]);
        assert_eq!(apply_linear_functional(&dirac, &p).unwrap(), q(-7));
    }

    #[test]
    fn pushforward_examples() {
        let g = gaussian(2, 4);
        let axis = pushforward_direction(&g, &[q(1), q(0)], 4).unwrap();
        assert_eq!(
            axis.values_1d().unwrap(),
            vec![q(1), q(0), q(1), q(0), q(3)]
        );
        let diag = pushforward_direction(&g, &[q(1), q(1)], 2).unwrap();
        assert_eq!(diag.values_1d().unwrap()[2], q(2));
        let a = atoms(vec![vec![q(1), q(1)]], vec![q(1)], 6);
        let s = pushforward_direction(&a, &[q(2), q(3)], 6).unwrap();
        for (k, v) in s.values_1d().unwrap().into_iter().enumerate() {
            assert_eq!(v, q(5).powi(k as u32));
        }
        assert!(matches!(
            pushforward_direction(&g, &[q(0), q(0)], 2),
            Err(Error::InvalidDirection(_))
        ));
    }

    #[test]
    fn marginal_examples() {
        let g = gaussian(2, 6);
        assert_eq!(marginal(&g, &[0, 1]).unwrap(), g);
        assert_eq!(
            marginal(&g, &[0]).unwrap().values_1d(),
            gaussian(1, 6).values_1d()
        );
        let a = atoms(vec![vec![q(1), q(2)]], vec![q(1)], 5);
        let m = marginal(&a, &[1]).unwrap().values_1d().unwrap();
        for (k, v) in m.into_iter().enumerate() {
            assert_eq!(v, q(2).powi(k as u32));
        }
    }

    #[test]
    fn convolution_examples() {
        let g = gaussian(1, 8);
        let dirac0 = atoms(vec![vec![q(0)]], vec![q(1)], 8);
        assert_eq!(convolve(&g, &dirac0).unwrap().values_1d(), g.values_1d());
        let gg = convolve(&g, &g).unwrap().values_1d().unwrap();
        let v2 = MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(2))],
        };
        let g2 = generate_moments::<Q>(&v2, 1, 8, ())
            .unwrap()
            .values_1d()
            .unwrap();
        assert_eq!(gg, g2);
        assert_eq!(gg[2], q(2));
        assert_eq!(gg[4], q(12));
        let da = atoms(vec![vec![qr(1, 3), q(2)]], vec![q(1)], 5);
        let db = atoms(vec![vec![q(-1), qr(5, 2)]], vec![q(1)], 5);
        let dab = atoms(vec![vec![qr(-2, 3), qr(9, 2)]], vec![q(1)], 5);
        assert_eq!(convolve(&da, &db).unwrap(), dab);
    }

    #[test]
    fn weight_examples() {
        let g = gaussian(1, 6);
        let one = MPoly::constant(1, q(1));
        assert_eq!(apply_polynomial_weight(&g, &one, None).unwrap(), g);
        let t2 = MPoly::from_terms(1, [(idx(&[2]), q(1))]);
        let w = apply_polynomial_weight(&g, &t2, None)
            .unwrap()
            .values_1d()
            .unwrap();
        assert_eq!((w[0].clone(), w[2].clone()), (q(1), q(3)));
        let lam = qr(3, 2);
        let d = atoms(vec![vec![lam.clone()]], vec![q(1)], 6);
        let sq = MPoly::from_terms(
            1,
            [
                (idx(&[2]), q(1)),
                (idx(&[1]), -q(2) * &lam),
                (idx(&[0]), &lam * &lam),
            ],
        );
        let z = apply_polynomial_weight(&d, &sq, None).unwrap();
        assert!(z.entries().all(|(_, v)| v == &q(0)));
        let neg = MPoly::from_terms(1, [(idx(&[1]), q(1))]);
        let grid = support_grid(&g, 5, 2.0);
        assert!(matches!(
            apply_polynomial_weight(&g, &neg, Some(&grid)),
            Err(Error::NegativeWeightDetected { .. })
        ));
    }

    #[test]
    fn affine_examples() {
        let g = gaussian(2, 4);
        let id = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert_eq!(affine_map(&g, &id, &[q(0), q(0)], None).unwrap(), g);
        let g1 = gaussian(1, 4);
        let scaled = affine_map(&g1, &[vec![q(2)]], &[q(0)], None).unwrap();
        assert_eq!(scaled.values_1d().unwrap()[2], q(4));
        let d = atoms(vec![vec![q(0)]], vec![q(1)], 3);
        let lifted = affine_map(&d, &[vec![q(1)], vec![q(1)]], &[q(1), q(0)], None).unwrap();
        assert_eq!(lifted, atoms(vec![vec![q(1), q(0)]], vec![q(1)], 3));
    }

    fn small_rational() -> impl Strategy<Value = Q> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qr(n, d))
    }

    fn random_atoms(dim: usize) -> impl Strategy<Value = MomentSequence<Q>> {
        proptest::collection::vec(
            (proptest::collection::vec(small_rational(), dim), 1i64..=5),
            1..4,
        )
        .prop_map(move |pts| {
            let (points, weights): (Vec<_>, Vec<_>) =
                pts.into_iter().map(|(p, w)| (p, q(w))).unzip();
            atoms(points, weights, 6)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pushforward_matches_functional_of_power(
            seq in random_atoms(2),
            xi in proptest::collection::vec(small_rational(), 2),
        ) {
            prop_assume!(xi.iter().any(|x| x != &q(0)));
            let s = pushforward_direction(&seq, &xi, 6).unwrap().values_1d().unwrap();
            let form = MPoly::affine_form(&xi, q(0));
            for (k, v) in s.iter().enumerate() {
                let direct = apply_linear_functional(&seq, &form.pow(k as u32)).unwrap();
                prop_assert_eq!(v, &direct);
            }
        }

        #[test]
        fn convolution_commutes_and_associates(
            a in random_atoms(2), b in random_atoms(2), c in random_atoms(2),
        ) {
            prop_assert_eq!(convolve(&a, &b).unwrap(), convolve(&b, &a).unwrap());
            let left = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
            let right = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn weights_compose(
            seq in random_atoms(1),
            w1 in proptest::collection::vec(small_rational(), 1..3),
            w2 in proptest::collection::vec(small_rational(), 1..3),
        ) {
            let to_poly = |c: &[Q]| MPoly::from_terms(
                1,
                c.iter().enumerate().map(|(k, v)| (idx(&[k as u32]), v.clone())),
            );
            let (p1, p2) = (to_poly(&w1), to_poly(&w2));
            prop_assume!(!p1.is_zero() && !p2.is_zero());
            let both = apply_polynomial_weight(&seq, &p1.mul(&p2), None).unwrap();
            let stepwise = apply_polynomial_weight(
                &apply_polynomial_weight(&seq, &p1, None).unwrap(), &p2, None,
            ).unwrap();
            prop_assert_eq!(both.values_1d().unwrap(), stepwise.truncate(both.max_degree()).unwrap().values_1d().unwrap());
        }

        #[test]
        fn rotation_then_axis_is_row_direction(seq in random_atoms(2), t in small_rational()) {
            // rational rotation from the stereographic parametrization
            let den = q(1) + &t * &t;
            let c = (q(1) - &t * &t) / &den;
            let s = q(2) * &t / &den;
            let a = vec![vec![c.clone(), -s.clone()], vec![s.clone(), c.clone()]];
            let rotated = affine_map(&seq, &a, &[q(0), q(0)], None).unwrap();
            let via_axis = pushforward_direction(&rotated, &[q(1), q(0)], 6).unwrap();
            let direct = pushforward_direction(&seq, &a[0], 6).unwrap();
            prop_assert_eq!(via_axis.values_1d().unwrap(), direct.values_1d().unwrap());
        }
    }
}
