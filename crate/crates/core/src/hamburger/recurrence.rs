use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::Scalar;

use super::{precision_lost, require_1d, shadow_agrees};

/// Three-term recurrence of the monic orthogonal polynomials
/// `x pi_k = pi_{k+1} + b_k pi_k + beta_k pi_{k-1}`.
///
/// Monic normalization keeps rational mode free of square roots; the
/// orthonormal off-diagonals are `a_k = sqrt(beta_k)` and `p_k = pi_k /
/// sqrt(h_k)` with norms `h_k = L(pi_k^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence<S: Scalar> {
    ctx: S::Context,
    b: Vec<S>,
    beta: Vec<S>,
    norms: Vec<S>,
    rank: Option<usize>,
    pivot_log2: Vec<f64>,
}

impl<S: Scalar> Recurrence<S> {
    pub fn ctx(&self) -> &S::Context {
        &self.ctx
    }

    /// Diagonal coefficients `b_0, b_1, ...`.
    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// `beta_0 = m_0`, then `beta_k = h_k / h_{k-1}`.
    pub fn beta(&self) -> &[S] {
        &self.beta
    }

    /// Norms `h_k = L(pi_k^2)`; the last one is zero when degenerate.
    pub fn norms(&self) -> &[S] {
        &self.norms
    }

    /// Highest degree whose monic polynomial is known.
    pub fn degree(&self) -> usize {
        self.norms.len() - 1
    }

    /// `Some(r)` when the measure has exactly `r` support points, detected
    /// as `h_r = 0`.
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    /// `log2 h_k`, the derivation log of pivot magnitudes.
    pub fn pivot_log2(&self) -> &[f64] {
        &self.pivot_log2
    }

    /// Orthonormal off-diagonal `a_k = sqrt(beta_k)` for `k >= 1`.
    pub fn a(&self, k: usize) -> S {
        self.beta[k].sqrt()
    }

    /// Moments `m_0..m_{2n}` rebuilt from the coefficients, `n = degree()`
    /// (up to `2n + 1` when `b_n` is known). Used as the round-trip oracle.
    pub fn reconstruct_moments(&self) -> Vec<S> {
        let ctx = &self.ctx;
        let n = self.degree();
        let top = if self.b.len() > n { 2 * n + 1 } else { 2 * n };
        // Jacobi operator J applied to e_0 repeatedly: m_k = m_0 <e_0, J^k e_0>
        // in the monic basis, where x pi_k = pi_{k+1} + b_k pi_k + beta_k pi_{k-1}.
        // Track x^k expanded in the pi basis: coefficients c_j; L(pi_j) = m_0 [j = 0].
        let zero = S::from_int(0, ctx);
        let mut coeffs = vec![S::from_int(1, ctx)];
        let mut out = vec![self.beta[0].clone()];
        for _ in 1..=top {
            let mut next = vec![zero.clone(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // x pi_j = pi_{j+1} + b_j pi_j + beta_j pi_{j-1}
                next[j + 1] = next[j + 1].clone() + c.clone();
                if let Some(bj) = self.b.get(j) {
                    next[j] = next[j].clone() + c.clone() * bj.clone();
                }
                if j > 0 {
                    let bj = self.beta.get(j).cloned().unwrap_or_else(|| zero.clone());
                    next[j - 1] = next[j - 1].clone() + c.clone() * bj;
                }
            }
            out.push(next[0].clone() * self.beta[0].clone());
            coeffs = next;
        }
        out
    }
}

struct Raw<S> {
    b: Vec<S>,
    beta: Vec<S>,
    norms: Vec<S>,
    rank: Option<usize>,
}

/// Chebyshev's algorithm on `m_0..m_{top}` with `sigma_{k,l} = L(pi_k x^l)`.
fn chebyshev<S: Scalar>(m: &[S], n: usize, ctx: &S::Context) -> Result<Raw<S>> {
    let top = m.len() - 1;
    let zero = S::from_int(0, ctx);
    let bits = match S::mode(ctx) {
        crate::scalar::ScalarMode::Float { bits } => Some(bits as f64),
        crate::scalar::ScalarMode::Rational => None,
    };
    let mut prev: Vec<S> = vec![zero.clone(); top + 1];
    let mut cur: Vec<S> = m.iter().map(|x| x.in_context(ctx)).collect();
    let mut b = Vec::new();
    let mut beta = vec![cur[0].clone()];
    let mut norms = vec![cur[0].clone()];
    if !cur[0].is_positive() {
        return Err(Error::NotPositiveDefinite { index: 0 });
    }
    for k in 0..=n {
        // cur = sigma_k (valid for k <= l <= top - k), prev = sigma_{k-1}
        if 2 * k < top {
            let mut bk = cur[k + 1].clone() / cur[k].clone();
            if k > 0 {
                bk = bk - prev[k].clone() / prev[k - 1].clone();
            }
            b.push(bk);
        }
        if k == n {
            break;
        }
        if 2 * (k + 1) > top {
            return Err(Error::DegreeInsufficient {
                needed: 2 * (k + 1),
                available: top,
            });
        }
        let mut next = vec![zero.clone(); top + 1];
        for l in (k + 1)..=(top - k - 1) {
            let mut v = cur[l + 1].clone() - b[k].clone() * cur[l].clone();
            if k > 0 {
                v = v - beta[k].clone() * prev[l].clone();
            }
            next[l] = v;
        }
        let h = next[k + 1].clone();
        // a float norm lost in rounding noise counts as zero
        let noise = match bits {
            Some(p) => {
                let scale = m[2 * (k + 1)].log2_abs();
                h.is_zero() || h.log2_abs() <= scale - (p - 16.0).max(8.0)
            }
            None => h.is_zero(),
        };
        if noise {
            let tail_vanishes = ((k + 1)..=(top - k - 1)).all(|l| match bits {
                Some(p) => {
                    next[l].is_zero()
                        || next[l].log2_abs()
                            <= m[(k + 1 + l).min(top)].log2_abs() - (p - 16.0).max(8.0)
                }
                None => next[l].is_zero(),
            });
            if !tail_vanishes {
                return Err(Error::NotPositiveDefinite { index: k + 1 });
            }
            beta.push(zero.clone());
            norms.push(zero.clone());
            return Ok(Raw {
                b,
                beta,
                norms,
                rank: Some(k + 1),
            });
        }
        if h.is_negative() {
            return Err(Error::NotPositiveDefinite { index: k + 1 });
        }
        beta.push(h.clone() / norms[k].clone());
        norms.push(h);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(Raw {
        b,
        beta,
        norms,
        rank: None,
    })
}

/// Recurrence coefficients up to degree `n` from the moments `m_0..m_{2n}`
/// (and `b_n` when `m_{2n+1}` is present).
///
/// A vanishing norm `h_r` (finitely atomic data) ends the recurrence at
/// degree `r` with [`Recurrence::rank`] set. Float mode reruns at a lower
/// precision and aborts with `PrecisionExhausted` on disagreement.
pub fn recurrence_from_moments<S: Scalar>(
    seq: &MomentSequence<S>,
    n: usize,
) -> Result<Recurrence<S>> {
    require_1d(seq)?;
    let values = seq.values_1d()?;
    if 2 * n > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: 2 * n,
            available: seq.max_degree(),
        });
    }
    let top = (2 * n + 1).min(seq.max_degree());
    let m = &values[..=top];
    let ctx = seq.ctx().clone();
    let shadow_ctx = S::shadow_context(&ctx);
    let raw = match (chebyshev(m, n, &ctx), &shadow_ctx) {
        (Ok(raw), _) => raw,
        // a float sign decision only stands if the shadow reaches it too
        (Err(Error::NotPositiveDefinite { index }), Some(sc)) => {
            return match chebyshev(m, n, sc) {
                Err(Error::NotPositiveDefinite { index: i }) if i == index => {
                    Err(Error::NotPositiveDefinite { index })
                }
                _ => Err(precision_lost(index, "norm sign")),
            }
        }
        (Err(e), _) => return Err(e),
    };
    if let Some(shadow_ctx) = shadow_ctx {
        let shadow = match chebyshev(m, n, &shadow_ctx) {
            Ok(s) => s,
            Err(_) => return Err(precision_lost(raw.norms.len(), "recurrence")),
        };
        if shadow.rank != raw.rank {
            return Err(precision_lost(raw.norms.len(), "degeneracy decision"));
        }
        for (k, (a, s)) in raw.norms.iter().zip(&shadow.norms).enumerate() {
            if !shadow_agrees(a, s) {
                return Err(precision_lost(k, "norm h_k"));
            }
        }
        for (k, (a, s)) in raw.b.iter().zip(&shadow.b).enumerate() {
            // b_k may legitimately vanish; compare against the scale of beta
            let scale = raw
                .beta
                .get(k + 1)
                .or(raw.beta.get(k))
                .cloned()
                .unwrap_or_else(|| a.clone());
            let diff = (a.clone() - s.in_context(&ctx)).log2_abs();
            let reference = a.log2_abs().max(scale.log2_abs() / 2.0);
            if diff != f64::NEG_INFINITY && diff > reference - super::SHADOW_AGREEMENT_BITS {
                return Err(precision_lost(k, "diagonal b_k"));
            }
        }
    }
    let pivot_log2 = raw.norms.iter().map(|h| h.log2_abs()).collect();
    Ok(Recurrence {
        ctx,
        b: raw.b,
        beta: raw.beta,
        norms: raw.norms,
        rank: raw.rank,
        pivot_log2,
    })
}
