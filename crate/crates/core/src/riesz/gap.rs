use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lp::Polytope;
use crate::moments::{MomentSequence, SupportHint};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

use super::SeparatingFunction;

/// A finite point set inside the support.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<S> {
    pub label: String,
    pub points: Vec<Vec<S>>,
}

/// `{0} ∪ {±2^{j/den} : lo <= j <= hi}`, the negative half only on the line.
fn log_axis<S: Scalar>(lo: i32, hi: i32, den: i32, line: bool, ctx: &S::Context) -> Vec<S> {
    let mut axis = vec![S::from_int(0, ctx)];
    for j in lo..=hi {
        let v = S::from_f64((j as f64 / den as f64).exp2(), ctx);
        if line {
            axis.push(-v.clone());
        }
        axis.push(v);
    }
    axis
}

fn product<S: Clone>(axis: &[S], dim: usize) -> Vec<Vec<S>> {
    let mut points = vec![Vec::new()];
    for _ in 0..dim {
        points = points
            .into_iter()
            .flat_map(|p: Vec<S>| {
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

impl<S: Scalar> Grid<S> {
    pub fn from_points(label: impl Into<String>, points: Vec<Vec<S>>) -> Self {
        Grid {
            label: label.into(),
            points,
        }
    }

    /// Logarithmic grid adapted to the support hint: in one variable
    /// `{0} ∪ {±2^{j/2} : -10 <= j <= 40}`, coarser per axis in more
    /// variables. Cones are sampled through nonnegative combinations of
    /// their generators; curve hints fall back to the full space.
    pub fn default_for(seq: &MomentSequence<S>) -> Result<Self> {
        let d = seq.dim();
        let ctx = seq.ctx();
        let (lo, hi, den) = match d {
            1 => (-10, 40, 2),
            2 => (-1, 4, 1),
            3 => (-1, 3, 1),
            4 => (0, 1, 1),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "no default grid in dimension {d}; pass one explicitly"
                )))
            }
        };
        let (label, points) = match seq.support() {
            SupportHint::NonnegativeOrthant => (
                "log-orthant",
                product(&log_axis::<S>(lo, hi, den, false, ctx), d),
            ),
            SupportHint::Cone(gens) => {
                let coeffs = product(&log_axis::<S>(lo, hi, den, false, ctx), gens.len().min(3));
                if gens.len() > 3 {
                    return Err(Error::InvalidParameter(
                        "no default grid for cones with more than three generators".into(),
                    ));
                }
                let pts = coeffs
                    .iter()
                    .map(|c| {
                        (0..d)
                            .map(|i| {
                                c.iter()
                                    .zip(gens)
                                    .fold(S::from_int(0, ctx), |acc, (ci, g)| {
                                        acc + ci.clone() * g[i].clone()
                                    })
                            })
                            .collect()
                    })
                    .collect();
                ("log-cone", pts)
            }
            SupportHint::FullSpace | SupportHint::Curve(_) => (
                "log-line",
                product(&log_axis::<S>(lo, hi, den, true, ctx), d),
            ),
        };
        Ok(Grid::from_points(label, points))
    }
}

/// Bits kept below the largest objective value when snapping.
const SNAP_BITS: i64 = 240;

/// Rounds approximations of transcendental values onto one dyadic lattice,
/// so exact pivoting works with a single power-of-two denominator.
fn snap_to_dyadic(values: &mut [BigRational]) {
    let top = values
        .iter()
        .map(|v| v.log2_abs())
        .fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return;
    }
    let shift = SNAP_BITS - top.floor() as i64;
    let one = BigInt::from(1);
    let scale = if shift >= 0 {
        BigRational::from_integer(one << shift as u64)
    } else {
        BigRational::new(one.clone(), one << (-shift) as u64)
    };
    for v in values.iter_mut() {
        *v = (&*v * &scale).round() / &scale;
    }
}

/// Two-sided grid relaxation of the separation problem.
///
/// Values are optimal `int phi dnu` over grid measures `nu` sharing the
/// moments through `degree`; by duality `sup_side` bounds the polynomial
/// minorant problem from above and `inf_side` bounds the majorant problem
/// from below. Neither side is certified.
#[derive(Clone, Debug, PartialEq)]
pub struct GapEstimate<S: Scalar> {
    pub sup_side: S,
    pub inf_side: S,
    pub gap: S,
    pub degree: usize,
    pub grid_label: String,
    pub grid_points: usize,
    pub certified: bool,
}

fn monomial<S: Scalar>(x: &[S], alpha: &MultiIndex, ctx: &S::Context) -> S {
    x.iter()
        .zip(alpha.exponents())
        .fold(S::from_int(1, ctx), |acc, (xi, &k)| acc * xi.powi(k))
}

pub fn grid_gap_lp<S: Scalar>(
    seq: &MomentSequence<S>,
    phi: &SeparatingFunction,
    degree: usize,
    grid: &Grid<S>,
) -> Result<GapEstimate<S>> {
    if grid.points.is_empty() {
        return Err(Error::InvalidParameter("grid is empty".into()));
    }
    if degree > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: degree,
            available: seq.max_degree(),
        });
    }
    phi.validate(seq)?;
    let d = seq.dim();
    let ctx = seq.ctx();
    if let Some(p) = grid.points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: p.len(),
        });
    }
    if matches!(seq.support(), SupportHint::NonnegativeOrthant)
        && grid.points.iter().flatten().any(|x| x.is_negative())
    {
        return Err(Error::WrongSupport(
            "grid leaves the nonnegative orthant".into(),
        ));
    }

    let alphas = MultiIndex::up_to_degree(d, degree);
    let a: Vec<Vec<S>> = alphas
        .iter()
        .map(|alpha| {
            grid.points
                .iter()
                .map(|g| monomial(g, alpha, ctx))
                .collect()
        })
        .collect();
    let b = alphas
        .iter()
        .map(|alpha| seq.moment(alpha))
        .collect::<Result<Vec<S>>>()?;
    let mut values = grid
        .points
        .iter()
        .map(|g| {
            let gq: Vec<BigRational> = g.iter().map(Scalar::to_rational).collect();
            phi.eval(&gq)
        })
        .collect::<Result<Vec<BigRational>>>()?;
    if !phi.is_rational() {
        snap_to_dyadic(&mut values);
    }
    let c: Vec<S> = values.iter().map(|v| S::from_rational(v, ctx)).collect();

    let polytope = Polytope::new(&a, &b, ctx).map_err(|e| match e {
        Error::LpInfeasible(_) => Error::LpUnbounded(format!(
            "no measure on the {}-point grid `{}` matches the moments through degree {degree}; refine the grid",
            grid.points.len(),
            grid.label
        )),
        other => other,
    })?;
    let sup_side = polytope.minimize(&c)?.value;
    let inf_side = polytope.maximize(&c)?.value;
    Ok(GapEstimate {
        gap: inf_side.clone() - sup_side.clone(),
        sup_side,
        inf_side,
        degree,
        grid_label: grid.label.clone(),
        grid_points: grid.points.len(),
        certified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamburger::{recurrence_from_moments, weyl_disk};
    use crate::moments::{generate_moments, Exact, MeasureDefinition};
    use crate::riesz::Phase;
    use num_complex::Complex;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn cosine() -> SeparatingFunction {
        SeparatingFunction::Cosine {
            xi: vec![Exact(q(1))],
            phase: Phase::Zero,
        }
    }

    #[test]
    fn dirac_gap_vanishes() {
        let d = MomentSequence::from_values(
            vec![q(1), q(0), q(0), q(0), q(0)],
            (),
            SupportHint::FullSpace,
        )
        .unwrap();
        let grid = Grid::default_for(&d).unwrap();
        let est = grid_gap_lp(&d, &cosine(), 4, &grid).unwrap();
        assert_eq!(est.sup_side, q(1));
        assert_eq!(est.inf_side, q(1));
        assert!(est.gap.is_zero());
        assert!(!est.certified);
    }

    #[test]
    fn two_atoms_interpolate() {
        let (w0, w1) = (Q::new(1.into(), 3.into()), Q::new(2.into(), 3.into()));
        let d = MomentSequence::from_values(vec![q(1), w1.clone()], (), SupportHint::FullSpace)
            .unwrap();
        let grid = Grid::from_points("atoms", vec![vec![q(0)], vec![q(1)]]);
        let est = grid_gap_lp(&d, &cosine(), 1, &grid).unwrap();
        let want: Q = w0 + w1 * Scalar::cos(&q(1));
        // cos 1 is rounded onto the 2^-240 lattice of the LP objective
        let err = (est.sup_side.clone() - want).abs() * Q::from_integer(BigInt::from(1) << 238u32);
        assert!(err < q(1), "{err}");
        assert!(est.gap.is_zero());
    }

    #[test]
    fn sparse_grid_reports_unbounded() {
        let g = generate_moments::<Q>(
            &MeasureDefinition::GaussianProduct {
                variances: vec![Exact(q(1))],
            },
            1,
            4,
            (),
        )
        .unwrap();
        let grid = Grid::from_points("pair", vec![vec![q(-1)], vec![q(1)]]);
        assert!(matches!(
            grid_gap_lp(&g, &cosine(), 4, &grid),
            Err(Error::LpUnbounded(_))
        ));
    }

    #[test]
    fn q_lattice_gap_within_weyl_disk() {
        let l = generate_moments::<Q>(&MeasureDefinition::QLattice1D { q: Exact(q(2)) }, 1, 8, ())
            .unwrap()
            .with_support(SupportHint::FullSpace);
        let grid = Grid::default_for(&l).unwrap();
        let phi = SeparatingFunction::CauchyRe {
            z: [Exact(q(0)), Exact(q(1))],
        };
        let est = grid_gap_lp(&l, &phi, 8, &grid).unwrap();
        assert!(est.gap > q(0));
        let rec = recurrence_from_moments(&l, 4).unwrap();
        let disk = weyl_disk(&rec, &Complex::new(q(0), q(1)), 3).unwrap();
        let diameter = disk.diameter().to_f64();
        assert!(
            est.gap.to_f64() <= diameter * (1.0 + 1e-9),
            "{} vs {diameter}",
            est.gap.to_f64()
        );
    }

    #[test]
    fn orthant_grid_must_stay_inside() {
        let e = generate_moments::<Q>(&MeasureDefinition::Exponential1D, 1, 2, ()).unwrap();
        let grid = Grid::from_points("bad", vec![vec![q(-1)], vec![q(1)]]);
        assert!(matches!(
            grid_gap_lp(&e, &cosine(), 2, &grid),
            Err(Error::WrongSupport(_))
        ));
    }
}
