use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::Scalar;

use super::{precision_lost, require_1d};

/// `H[i][j] = m_{i+j}`, `0 <= i, j <= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelMatrix<S: Scalar> {
    ctx: S::Context,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> HankelMatrix<S> {
    /// Number of rows (`n + 1`).
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn ctx(&self) -> &S::Context {
        &self.ctx
    }

    /// Build directly from `m_0..m_{2n}`.
    pub fn from_moments(values: &[S], n: usize, ctx: S::Context) -> Result<Self> {
        if values.len() < 2 * n + 1 {
            return Err(Error::DegreeInsufficient {
                needed: 2 * n,
                available: values.len().saturating_sub(1),
            });
        }
        let rows = (0..=n)
            .map(|i| (0..=n).map(|j| values[i + j].clone()).collect())
            .collect();
        Ok(HankelMatrix { ctx, rows })
    }
}

/// Hankel matrix of order `n + 1` of a 1D sequence.
pub fn hankel<S: Scalar>(seq: &MomentSequence<S>, n: usize) -> Result<HankelMatrix<S>> {
    require_1d(seq)?;
    HankelMatrix::from_moments(&seq.values_1d()?, n, seq.ctx().clone())
}

/// Outcome of the positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admissibility {
    PositiveDefinite,
    PositiveSemidefiniteRank(usize),
    Indefinite,
}

/// Symmetric elimination that skips zero pivots (whose rows must then vanish
/// for semidefiniteness). Pivots are returned for the shadow comparison.
fn classify<S: Scalar>(rows: &[Vec<S>], ctx: &S::Context) -> (Admissibility, Vec<S>) {
    let n = rows.len();
    let mut a: Vec<Vec<S>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.in_context(ctx)).collect())
        .collect();
    let diag: Vec<S> = (0..n).map(|i| a[i][i].clone()).collect();
    let prec_bits = match S::mode(ctx) {
        crate::scalar::ScalarMode::Float { bits } => Some(bits as f64),
        crate::scalar::ScalarMode::Rational => None,
    };
    // Float pivots below this many bits of the original diagonal are noise.
    let negligible = |v: &S, reference_log2: f64| match prec_bits {
        None => v.is_zero(),
        Some(bits) => v.is_zero() || v.log2_abs() <= reference_log2 - (bits - 16.0).max(8.0),
    };
    let mut rank = 0;
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        pivots.push(p.clone());
        if negligible(&p, diag[k].log2_abs()) {
            let row_vanishes = (k + 1..n)
                .all(|j| negligible(&a[k][j], (diag[k].log2_abs() + diag[j].log2_abs()) / 2.0));
            if !row_vanishes {
                return (Admissibility::Indefinite, pivots);
            }
            continue;
        }
        if p.is_negative() {
            return (Admissibility::Indefinite, pivots);
        }
        rank += 1;
        for i in k + 1..n {
            let f = a[i][k].clone() / p.clone();
            for j in k + 1..n {
                let v = a[i][j].clone() - f.clone() * a[k][j].clone();
                a[i][j] = v;
            }
        }
    }
    let status = if rank == n {
        Admissibility::PositiveDefinite
    } else {
        Admissibility::PositiveSemidefiniteRank(rank)
    };
    (status, pivots)
}

/// Positive (semi)definiteness of a Hankel matrix in its scalar mode.
///
/// Float mode repeats the factorization at a lower precision and reports
/// `PrecisionExhausted` when the two disagree on a pivot sign or rank.
pub fn admissibility_check<S: Scalar>(h: &HankelMatrix<S>) -> Result<Admissibility> {
    let (status, pivots) = classify(h.rows(), h.ctx());
    if let Some(shadow_ctx) = S::shadow_context(h.ctx()) {
        let (shadow_status, shadow_pivots) = classify(h.rows(), &shadow_ctx);
        if shadow_status != status {
            return Err(precision_lost(pivots.len(), "Hankel rank decision"));
        }
        for (k, (a, b)) in pivots.iter().zip(&shadow_pivots).enumerate() {
            if a.is_negative() != b.is_negative() {
                return Err(precision_lost(k, "Hankel pivot sign"));
            }
        }
    }
    Ok(status)
}
