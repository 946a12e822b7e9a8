//! Dense two-phase tableau simplex over `{y >= 0 : A y = b}`.
//!
//! Rational mode pivots exactly. Float mode compares against a tolerance
//! derived from the working precision after power-of-two equilibration of
//! rows and columns (which is exact, so rational results are unaffected).
//! Pricing is by most negative reduced cost, with Bland's rule taking over
//! on degenerate stalls so the method cannot cycle.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

#[derive(Clone, Debug)]
struct Tol {
    /// `log2` of the zero threshold; `-inf` in exact mode.
    log2: f64,
}

impl Tol {
    fn for_ctx<S: Scalar>(ctx: &S::Context) -> Tol {
        let log2 = match S::mode(ctx) {
            ScalarMode::Rational => f64::NEG_INFINITY,
            ScalarMode::Float { bits } => -((bits / 2).max(20) as f64),
        };
        Tol { log2 }
    }

    fn negligible<S: Scalar>(&self, x: &S) -> bool {
        x.is_zero() || x.log2_abs() <= self.log2
    }

    fn positive<S: Scalar>(&self, x: &S) -> bool {
        x.is_positive() && !self.negligible(x)
    }

    fn negative<S: Scalar>(&self, x: &S) -> bool {
        x.is_negative() && !self.negligible(x)
    }
}

/// `2^k` as a scalar.
fn pow2<S: Scalar>(k: i64, ctx: &S::Context) -> S {
    let two = S::from_int(2, ctx);
    let p = two.powi(k.unsigned_abs() as u32);
    if k >= 0 {
        p
    } else {
        S::from_int(1, ctx) / p
    }
}

fn scale_exponent(max_log2: f64) -> i64 {
    if max_log2.is_finite() {
        -(max_log2.floor() as i64)
    } else {
        0
    }
}

/// A feasible basis of `{y >= 0 : A y = b}`, ready for any objective.
#[derive(Clone, Debug)]
pub struct Polytope<S: Scalar> {
    ctx: S::Context,
    tol: Tol,
    /// Rows `[A | b]` after phase one, in the basis given by `basis`.
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// `y_j = col_scale[j] * y'_j` undoes column equilibration.
    col_scale: Vec<S>,
    ncols: usize,
}

/// Optimal vertex of a linear objective.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<S: Scalar> {
    pub value: S,
    pub y: Vec<S>,
}

fn pivot<S: Scalar>(rows: &mut [Vec<S>], obj: &mut [S], r: usize, c: usize) {
    let p = rows[r][c].clone();
    for v in rows[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, pv) in obj.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
}

/// Consecutive degenerate pivots tolerated before pricing falls back to
/// Bland's rule.
const STALL_LIMIT: usize = 50;

/// Minimize the objective row in place. `obj[j]` are reduced costs and the
/// last entry is minus the current value. Columns `>= allowed` never enter.
///
/// Prices by the most negative reduced cost; a run of degenerate pivots
/// switches to Bland's rule, which cannot cycle, until progress resumes.
fn run<S: Scalar>(
    rows: &mut [Vec<S>],
    obj: &mut [S],
    basis: &mut [usize],
    allowed: usize,
    tol: &Tol,
) -> Result<()> {
    let rhs = obj.len() - 1;
    let mut stalled = 0;
    loop {
        let entering = if stalled < STALL_LIMIT {
            (0..allowed)
                .filter(|&j| tol.negative(&obj[j]))
                .min_by(|&i, &j| {
                    obj[i]
                        .partial_cmp(&obj[j])
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        } else {
            (0..allowed).find(|&j| tol.negative(&obj[j]))
        };
        let Some(c) = entering else {
            return Ok(());
        };
        let mut best: Option<(usize, S)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !tol.positive(&row[c]) {
                continue;
            }
            let ratio = row[rhs].clone() / row[c].clone();
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        let Some((r, step)) = best else {
            return Err(Error::LpUnbounded(format!(
                "objective decreases without bound along column {c}"
            )));
        };
        if tol.negligible(&step) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        pivot(rows, obj, r, c);
        basis[r] = c;
    }
}

impl<S: Scalar> Polytope<S> {
    /// Phase one. `a` is given by rows; fails with `LpInfeasible` when no
    /// nonnegative solution exists.
    pub fn new(a: &[Vec<S>], b: &[S], ctx: &S::Context) -> Result<Self> {
        let m = a.len();
        if m == 0 || b.len() != m {
            return Err(Error::InvalidParameter(
                "LP needs matching, non-empty A and b".into(),
            ));
        }
        let n = a[0].len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(
                "LP matrix rows must share a positive length".into(),
            ));
        }
        let tol = Tol::for_ctx::<S>(ctx);
        // equilibrate columns, then rows, by powers of two
        let col_exp: Vec<i64> = (0..n)
            .map(|j| {
                scale_exponent(
                    a.iter()
                        .map(|r| r[j].log2_abs())
                        .fold(f64::NEG_INFINITY, f64::max),
                )
            })
            .collect();
        let col_scale: Vec<S> = col_exp.iter().map(|&k| pow2::<S>(k, ctx)).collect();
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(m);
        for (i, r) in a.iter().enumerate() {
            let mut row: Vec<S> = r
                .iter()
                .zip(&col_scale)
                .map(|(v, s)| v.in_context(ctx) * s.clone())
                .collect();
            let mut rhs = b[i].in_context(ctx);
            let k = scale_exponent(
                row.iter()
                    .chain([&rhs])
                    .map(|v| v.log2_abs())
                    .fold(f64::NEG_INFINITY, f64::max),
            );
            let s = pow2::<S>(k, ctx);
            for v in row.iter_mut() {
                *v = v.clone() * s.clone();
            }
            rhs = rhs * s;
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            // artificial columns n..n+m
            row.extend((0..m).map(|k| S::from_int(i64::from(k == i), ctx)));
            row.push(rhs);
            rows.push(row);
        }
        let width = n + m + 1;
        let zero = S::from_int(0, ctx);
        let mut obj = vec![zero.clone(); width];
        for row in &rows {
            for j in 0..n {
                obj[j] = obj[j].clone() - row[j].clone();
            }
            obj[width - 1] = obj[width - 1].clone() - row[width - 1].clone();
        }
        let mut basis: Vec<usize> = (n..n + m).collect();
        run(&mut rows, &mut obj, &mut basis, n, &tol)?;
        let residual = -obj[width - 1].clone();
        let rhs_scale = rows
            .iter()
            .map(|r| r[width - 1].log2_abs())
            .fold(0.0, f64::max);
        if !(residual.is_zero() || residual.log2_abs() <= tol.log2 + rhs_scale) {
            return Err(Error::LpInfeasible(format!(
                "no nonnegative solution (phase-one residual {})",
                residual.to_decimal()
            )));
        }
        // drive artificials out of the basis; rows where that fails are redundant
        let mut i = 0;
        while i < rows.len() {
            if basis[i] >= n {
                match (0..n).find(|&j| !tol.negligible(&rows[i][j])) {
                    Some(j) => {
                        pivot(&mut rows, &mut obj, i, j);
                        basis[i] = j;
                    }
                    None => {
                        rows.remove(i);
                        basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in rows.iter_mut() {
            let rhs = row[width - 1].clone();
            row.truncate(n);
            row.push(rhs);
        }
        Ok(Polytope {
            ctx: ctx.clone(),
            tol,
            rows,
            basis,
            col_scale,
            ncols: n,
        })
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// `min c . y` over the polytope.
    pub fn minimize(&self, c: &[S]) -> Result<LpSolution<S>> {
        if c.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                left: self.ncols,
                right: c.len(),
            });
        }
        let n = self.ncols;
        let mut rows = self.rows.clone();
        let mut basis = self.basis.clone();
        let cost: Vec<S> = c
            .iter()
            .zip(&self.col_scale)
            .map(|(v, s)| v.in_context(&self.ctx) * s.clone())
            .collect();
        let mut obj: Vec<S> = cost.clone();
        obj.push(S::from_int(0, &self.ctx));
        for (row, &bj) in rows.iter().zip(&basis) {
            let cb = cost[bj].clone();
            if cb.is_zero() {
                continue;
            }
            for (v, rv) in obj.iter_mut().zip(row) {
                *v = v.clone() - cb.clone() * rv.clone();
            }
        }
        run(&mut rows, &mut obj, &mut basis, n, &self.tol)?;
        let mut y = vec![S::from_int(0, &self.ctx); n];
        for (row, &bj) in rows.iter().zip(&basis) {
            y[bj] = row[n].clone() * self.col_scale[bj].clone();
        }
        let value = -obj[n].clone();
        Ok(LpSolution { value, y })
    }

    /// `max c . y` over the polytope.
    pub fn maximize(&self, c: &[S]) -> Result<LpSolution<S>> {
        let neg: Vec<S> = c.iter().map(|v| -v.clone()).collect();
        let mut s = self.minimize(&neg)?;
        s.value = -s.value;
        Ok(s)
    }
}
