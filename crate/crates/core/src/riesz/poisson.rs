use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Pow;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamburger::{recurrence_from_moments, weyl_disk, Recurrence};
use crate::moments::{Exact, MomentSequence};
use crate::multiindex::factorial;
use crate::scalar::Scalar;

use super::{grid_gap_lp, GapEstimate, Grid, SeparatingFunction};

type Q = BigRational;

/// `Gamma((d+1)/2) / pi^{(d+1)/2}`, the Poisson kernel constant of the
/// upper half-space over `R^d` (pi rounded to 256 bits).
pub fn poisson_constant(d: usize) -> Q {
    let pi: Q = Scalar::pi(&());
    if d % 2 == 1 {
        let k = d.div_ceil(2);
        Q::from_integer(factorial(k as u32 - 1)) / pi.pow(k as u32)
    } else {
        let k = d / 2;
        let num = factorial(2 * k as u32);
        let den = BigInt::from(4u32).pow(k as u32) * factorial(k as u32);
        Q::new(num, den) / pi.pow(k as u32)
    }
}

fn kappa_from_rec<S: Scalar>(rec: &Recurrence<S>, x0: &S, t0: &S, n: usize) -> Result<S> {
    let ctx = rec.ctx();
    let disk = weyl_disk(
        rec,
        &Complex::new(x0.in_context(ctx), t0.in_context(ctx)),
        n,
    )?;
    Ok(disk.diameter() / S::pi(ctx))
}

fn require_positive<S: Scalar>(t0: &S) -> Result<()> {
    if !t0.is_positive() {
        return Err(Error::InvalidParameter(
            "the height t0 must be positive".into(),
        ));
    }
    Ok(())
}

/// Width of the range of Poisson integrals at `(x0, t0)` over all measures
/// sharing the moments through `2n + 2`: the Weyl disk diameter over `pi`.
pub fn poisson_kappa_1d<S: Scalar>(seq: &MomentSequence<S>, x0: &S, t0: &S, n: usize) -> Result<S> {
    require_positive(t0)?;
    let rec = recurrence_from_moments(seq, n + 1)?;
    kappa_from_rec(&rec, x0, t0, n)
}

/// Grid estimate of the same width in any dimension.
pub fn poisson_kappa_estimate<S: Scalar>(
    seq: &MomentSequence<S>,
    x0: &[S],
    t0: &S,
    degree: usize,
    grid: &Grid<S>,
) -> Result<GapEstimate<S>> {
    require_positive(t0)?;
    let phi = SeparatingFunction::PoissonKernel {
        x0: x0.iter().map(|v| Exact(v.to_rational())).collect(),
        t0: Exact(t0.to_rational()),
    };
    grid_gap_lp(seq, &phi, degree, grid)
}

fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `count` nearly uniform unit vectors in `R^{d+1}`: equally spaced on the
/// circle, a Fibonacci lattice on `S^2`, normalized Gaussian Halton points
/// beyond.
pub fn sphere_nodes(d: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    use std::f64::consts::TAU;
    if count == 0 {
        return Err(Error::InvalidParameter(
            "at least one sphere node is needed".into(),
        ));
    }
    Ok(match d {
        0 => return Err(Error::InvalidParameter("dimension must be >= 1".into())),
        1 => (0..count)
            .map(|k| {
                let a = TAU * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        2 => {
            let golden = TAU * (1.0 - 1.0 / ((1.0 + 5f64.sqrt()) / 2.0));
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let dim = d + 1;
            let pairs = dim.div_ceil(2);
            if 2 * pairs > PRIMES.len() {
                return Err(Error::InvalidParameter(format!(
                    "sphere nodes unsupported in dimension {d}"
                )));
            }
            (1..=count)
                .map(|i| {
                    let mut v: Vec<f64> = (0..pairs)
                        .flat_map(|p| {
                            let u1 = halton(i, PRIMES[2 * p]).max(f64::MIN_POSITIVE);
                            let u2 = halton(i, PRIMES[2 * p + 1]);
                            let r = (-2.0 * u1.ln()).sqrt();
                            [r * (TAU * u2).cos(), r * (TAU * u2).sin()]
                        })
                        .take(dim)
                        .collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.iter_mut().for_each(|x| *x /= norm);
                    v
                })
                .collect()
        }
    })
}

/// Poisson widths over a sphere of radius `r` around `(x0, t0)` in the
/// upper half-space.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereAverage<S: Scalar> {
    /// `(x, t)` per node.
    pub nodes: Vec<(Vec<S>, S)>,
    pub values: Vec<S>,
    pub mean: S,
}

/// Averages the Poisson width over sphere nodes. One-variable data use the
/// Weyl disk at level `degree / 2 - 1`; otherwise each node solves the grid
/// relaxation at `degree`.
pub fn sphere_average_kappa<S: Scalar>(
    seq: &MomentSequence<S>,
    x0: &[S],
    t0: &S,
    r: &S,
    count: usize,
    degree: usize,
    grid: Option<&Grid<S>>,
) -> Result<SphereAverage<S>> {
    let d = seq.dim();
    let ctx = seq.ctx();
    if x0.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: x0.len(),
        });
    }
    if !r.is_positive() || !(t0.clone() - r.clone()).is_positive() {
        return Err(Error::InvalidParameter(
            "need 0 < r < t0 to stay in the upper half-space".into(),
        ));
    }
    let nodes: Vec<(Vec<S>, S)> = sphere_nodes(d, count)?
        .into_iter()
        .map(|u| {
            let x = (0..d)
                .map(|i| x0[i].clone() + r.clone() * S::from_f64(u[i], ctx))
                .collect();
            let t = t0.clone() + r.clone() * S::from_f64(u[d], ctx);
            (x, t)
        })
        .collect();
    let values: Vec<S> = if d == 1 {
        if degree < 4 {
            return Err(Error::DegreeInsufficient {
                needed: 4,
                available: degree,
            });
        }
        let n = degree / 2 - 1;
        let rec = recurrence_from_moments(seq, n + 1)?;
        nodes
            .par_iter()
            .map(|(x, t)| kappa_from_rec(&rec, &x[0], t, n))
            .collect::<Result<_>>()?
    } else {
        let owned;
        let grid = match grid {
            Some(g) => g,
            None => {
                owned = Grid::default_for(seq)?;
                &owned
            }
        };
        nodes
            .par_iter()
            .map(|(x, t)| poisson_kappa_estimate(seq, x, t, degree, grid).map(|e| e.gap))
            .collect::<Result<_>>()?
    };
    let total = values
        .iter()
        .fold(S::from_int(0, ctx), |a, v| a + v.clone());
    let mean = total / S::from_int(values.len() as i64, ctx);
    Ok(SphereAverage {
        nodes,
        values,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{generate_moments, MeasureDefinition, SupportHint};
    use crate::scalar::BigFloat;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn constants() {
        let pi = std::f64::consts::PI;
        assert!((poisson_constant(1).to_f64() - 1.0 / pi).abs() < 1e-16);
        // Gamma(3/2) / pi^{3/2} = 1 / (2 pi)
        assert!((poisson_constant(2).to_f64() - 0.5 / pi).abs() < 1e-16);
        // Gamma(2) / pi^2
        assert!((poisson_constant(3).to_f64() - 1.0 / (pi * pi)).abs() < 1e-16);
    }

    #[test]
    fn atomic_data_pin_the_integral() {
        let d = MomentSequence::from_values(
            vec![q(1), q(0), q(0), q(0), q(0), q(0)],
            (),
            SupportHint::FullSpace,
        )
        .unwrap();
        assert_eq!(poisson_kappa_1d(&d, &q(0), &q(1), 1).unwrap(), q(0));
    }

    #[test]
    fn gaussian_width_shrinks_q_lattice_stalls() {
        let g: MomentSequence<BigFloat> = generate_moments(
            &MeasureDefinition::GaussianProduct {
                variances: vec![Exact(q(1))],
            },
            1,
            40,
            512,
        )
        .unwrap();
        let one = BigFloat::from_int(1, &512);
        let zero = BigFloat::from_int(0, &512);
        let k5 = poisson_kappa_1d(&g, &zero, &one, 5).unwrap().to_f64();
        let k18 = poisson_kappa_1d(&g, &zero, &one, 18).unwrap().to_f64();
        assert!(k18 < 0.1 * k5, "{k5} {k18}");

        let l: MomentSequence<Q> =
            generate_moments(&MeasureDefinition::QLattice1D { q: Exact(q(2)) }, 1, 24, ()).unwrap();
        let k5 = poisson_kappa_1d(&l, &q(0), &q(1), 5).unwrap().to_f64();
        let k10 = poisson_kappa_1d(&l, &q(0), &q(1), 10).unwrap().to_f64();
        assert!(k10 > 0.5 * k5, "{k5} {k10}");
    }

    #[test]
    fn nodes_are_unit_vectors() {
        for d in 1..=4 {
            let nodes = sphere_nodes(d, 64).unwrap();
            assert_eq!(nodes.len(), 64);
            for v in nodes {
                assert_eq!(v.len(), d + 1);
                assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_average_one_dimension() {
        let l: MomentSequence<Q> =
            generate_moments(&MeasureDefinition::QLattice1D { q: Exact(q(2)) }, 1, 12, ()).unwrap();
        let avg = sphere_average_kappa(&l, &[q(0)], &q(2), &q(1), 8, 12, None).unwrap();
        assert_eq!(avg.values.len(), 8);
        assert!(avg.values.iter().all(|v| *v > q(0)));
        let lo = avg.values.iter().min().unwrap();
        let hi = avg.values.iter().max().unwrap();
        assert!(lo <= &avg.mean && &avg.mean <= hi);
        assert!(matches!(
            sphere_average_kappa(&l, &[q(0)], &q(1), &q(1), 8, 12, None),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn grid_estimate_in_two_dimensions() {
        let atoms = MeasureDefinition::Atomic {
            points: vec![
                vec![Exact(q(0)), Exact(q(0))],
                vec![Exact(q(1)), Exact(q(2))],
            ],
            weights: vec![Exact(q(1)), Exact(q(1))],
        };
        let a: MomentSequence<Q> = generate_moments(&atoms, 2, 4, ()).unwrap();
        let grid = Grid::from_points(
            "atoms",
            vec![vec![q(0), q(0)], vec![q(1), q(2)], vec![q(2), q(1)]],
        );
        let est = poisson_kappa_estimate(&a, &[q(0), q(0)], &q(1), 2, &grid).unwrap();
        assert_eq!(est.gap, q(0));
    }
}
