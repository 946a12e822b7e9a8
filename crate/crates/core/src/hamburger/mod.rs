//! The one-variable engine: Hankel positivity, recurrences, orthogonal
//! polynomials, Christoffel functions, Weyl disks, Carleman sums, Stieltjes
//! convergents and the synthesized 1D verdict.

mod carleman;
mod hankel;
mod ortho;
mod recurrence;
mod stieltjes;
mod verdict;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use carleman::{carleman, CarlemanResult};
pub use hankel::{admissibility_check, hankel, Admissibility, HankelMatrix};
pub use ortho::{christoffel, christoffel_chain, ortho_eval, weyl_disk, OrthoEval, WeylDisk};
pub use recurrence::{recurrence_from_moments, Recurrence};
pub use stieltjes::{stieltjes_convergents, StieltjesLevel};
pub use verdict::{verdict_1d, Evidence, Flavor, Status, Sufficiency, Verdict, VerdictConfig};

/// Relative disagreement (as a power of two) tolerated between a float
/// computation and its lower-precision shadow.
const SHADOW_AGREEMENT_BITS: f64 = 8.0;

/// Compare a float result with its shadow; exact mode always agrees.
pub(crate) fn shadow_agrees<S: Scalar>(main: &S, shadow: &S) -> bool {
    if S::is_exact() {
        return true;
    }
    let ctx = main.context();
    let diff = (main.clone() - shadow.in_context(&ctx)).log2_abs();
    if diff == f64::NEG_INFINITY {
        return true;
    }
    let scale = main.log2_abs().max(shadow.log2_abs());
    diff <= scale - SHADOW_AGREEMENT_BITS
}

pub(crate) fn require_1d<S: Scalar>(seq: &crate::moments::MomentSequence<S>) -> Result<()> {
    if seq.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: seq.dim(),
        });
    }
    Ok(())
}

pub(crate) fn precision_lost(step: usize, what: &str) -> Error {
    Error::PrecisionExhausted {
        step,
        detail: format!("{what} disagrees with its lower-precision shadow"),
    }
}
