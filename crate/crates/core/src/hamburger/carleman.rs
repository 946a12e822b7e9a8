use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::Scalar;

use super::{require_1d, Flavor};

/// Finite-horizon Carleman sum.
///
/// Terms are `m_{2k}^{-1/(2k)}` (Hamburger) or `m_k^{-1/(2k)}` (Stieltjes)
/// for `k = 1..=K`, evaluated through `log2` so that astronomically large
/// exact moments never have to be rounded first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlemanResult {
    pub flavor: Flavor,
    pub horizon: usize,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub partial_sum: f64,
    /// Slope test: every term in the last quarter has `k * t_k >= c`.
    pub diverging: bool,
    pub c: f64,
    /// The sequence carries a growth bound consistent with its moments that
    /// forces divergence at every horizon.
    pub certified: bool,
}

/// Divergence threshold for the slope test.
pub const DEFAULT_SLOPE_C: f64 = 0.2;

pub fn carleman<S: Scalar>(
    seq: &MomentSequence<S>,
    flavor: Flavor,
    horizon: usize,
    c: f64,
) -> Result<CarlemanResult> {
    require_1d(seq)?;
    let m = seq.values_1d()?;
    let needed = match flavor {
        Flavor::Hamburger => 2 * horizon,
        Flavor::Stieltjes => horizon,
    };
    if needed >= m.len() {
        return Err(Error::DegreeInsufficient {
            needed,
            available: m.len() - 1,
        });
    }
    let mut terms = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let order = match flavor {
            Flavor::Hamburger => 2 * k,
            Flavor::Stieltjes => k,
        };
        if !m[order].is_positive() {
            return Err(Error::NonpositiveEvenMoment { order });
        }
        terms.push((-m[order].log2_abs() / (2 * k) as f64).exp2());
    }
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let start = horizon - horizon / 4;
    let diverging = horizon > 0
        && terms
            .iter()
            .enumerate()
            .skip(start.min(horizon - 1))
            .all(|(i, t)| t * (i + 1) as f64 >= c);
    let max_exponent = match flavor {
        Flavor::Hamburger => 1.0,
        Flavor::Stieltjes => 2.0,
    };
    let certified = seq
        .growth_bound()
        .is_some_and(|g| g.exponent <= max_exponent && g.consistent_with(seq));
    Ok(CarlemanResult {
        flavor,
        horizon,
        partial_sum: partial_sums.last().copied().unwrap_or(0.0),
        terms,
        partial_sums,
        diverging,
        c,
        certified,
    })
}
