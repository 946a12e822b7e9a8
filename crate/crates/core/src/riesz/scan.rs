use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamburger::{verdict_1d, Flavor, Status, Sufficiency, Verdict, VerdictConfig};
use crate::moments::{pushforward_direction, MomentSequence};
use crate::scalar::Scalar;

/// The one-variable verdict on the push-forward along `direction`, or the
/// reason none could be formed.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionVerdict<S: Scalar> {
    pub direction: Vec<S>,
    pub verdict: std::result::Result<Verdict, Error>,
}

/// Aggregate of a direction scan.
#[derive(Clone, Debug, PartialEq)]
pub struct Scan<S: Scalar> {
    pub entries: Vec<DirectionVerdict<S>>,
    pub status: Status,
    pub sufficiency: Option<Sufficiency>,
    /// Rank of the span of the determinate directions.
    pub determinate_rank: usize,
    pub note: String,
}

/// Rank of a set of vectors, computed exactly on their rational values.
fn rank<S: Scalar>(vectors: &[&Vec<S>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(Scalar::to_rational).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone() / &pivot[c];
            for (v, pv) in row.iter_mut().zip(&pivot) {
                *v -= &f * pv;
            }
        }
        r += 1;
    }
    r
}

/// The aggregation rule on its own: `rank` is the span of the determinate
/// directions, `indeterminate` the number of indeterminate ones.
fn aggregate(d: usize, rank: usize, indeterminate: usize) -> (Status, Option<Sufficiency>, String) {
    match (rank == d, indeterminate == 0) {
        (true, true) => (
            Status::Determinate,
            Some(Sufficiency::RigorousSufficient),
            "determinate push-forwards span every direction".to_string(),
        ),
        (false, false) => (
            Status::Indeterminate,
            Some(Sufficiency::LimitRigorousNumeric),
            format!("{indeterminate} push-forward(s) indeterminate"),
        ),
        (true, false) => (
            Status::Inconclusive,
            None,
            "determinate basis conflicts with an indeterminate direction".to_string(),
        ),
        (false, true) => (
            Status::Inconclusive,
            None,
            format!("determinate directions span only {rank} of {d} dimensions"),
        ),
    }
}

/// Runs the one-variable verdict along each direction and aggregates:
/// determinate directions spanning the space give a determinate verdict, a
/// single indeterminate direction gives indeterminacy evidence, anything
/// else (including a conflict) is inconclusive.
pub fn direction_scan<S: Scalar>(
    seq: &MomentSequence<S>,
    directions: &[Vec<S>],
    flavor: Flavor,
    config: &VerdictConfig,
) -> Result<Scan<S>> {
    let d = seq.dim();
    if directions.is_empty() {
        return Err(Error::InvalidDirection("no directions given".into()));
    }
    for xi in directions {
        if xi.len() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: xi.len(),
            });
        }
        if xi.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidDirection("direction is zero".into()));
        }
    }
    let entries: Vec<DirectionVerdict<S>> = directions
        .par_iter()
        .map(|xi| DirectionVerdict {
            direction: xi.clone(),
            verdict: pushforward_direction(seq, xi, seq.max_degree())
                .and_then(|pf| verdict_1d(&pf, flavor, config)),
        })
        .collect();

    let with_status = |st: Status| -> Vec<&Vec<S>> {
        entries
            .iter()
            .filter(|e| matches!(&e.verdict, Ok(v) if v.status == st))
            .map(|e| &e.direction)
            .collect()
    };
    let determinate = with_status(Status::Determinate);
    let indeterminate = with_status(Status::Indeterminate);
    let determinate_rank = rank(&determinate);
    let (status, sufficiency, note) = aggregate(d, determinate_rank, indeterminate.len());
    Ok(Scan {
        entries,
        status,
        sufficiency,
        determinate_rank,
        note,
    })
}
