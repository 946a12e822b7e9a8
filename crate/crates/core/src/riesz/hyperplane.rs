use crate::error::{Error, Result};
use crate::moments::{apply_polynomial_weight, Exact, MomentSequence};
use crate::poly::MPoly;
use crate::scalar::Scalar;

use super::{grid_gap_lp, Grid, SeparatingFunction};

/// Grid values of the two hyperplane programs at `a`; `certified` is always
/// false.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneGap<S: Scalar> {
    /// `min L(r)` over `r = 1 - (a . x + 1) p >= 0` on the grid.
    pub value_plus: S,
    /// `min L(r)` over `r = (a . x + 1) q - 1 >= 0` on the grid.
    pub value_minus: S,
    pub degree: usize,
    pub grid_label: String,
    pub certified: bool,
}

/// Both programs reduce to the grid relaxation for `phi = 1 / (a . x + 1)`
/// against the weighted functional `p -> L((a . x + 1) p)`, which needs
/// moments through `degree + 1`.
pub fn hyperplane_gap<S: Scalar>(
    seq: &MomentSequence<S>,
    a: &[S],
    degree: usize,
    grid: &Grid<S>,
) -> Result<HyperplaneGap<S>> {
    if a.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            left: seq.dim(),
            right: a.len(),
        });
    }
    if !seq.support().is_conic() {
        return Err(Error::WrongSupport(
            "the hyperplane criterion needs a cone support hint".into(),
        ));
    }
    if !seq.support().dual_interior(a, 1e-12) {
        return Err(Error::NotInteriorDirection(
            "a must be strictly positive on the cone".into(),
        ));
    }
    if degree + 1 > seq.max_degree() {
        return Err(Error::DegreeInsufficient {
            needed: degree + 1,
            available: seq.max_degree(),
        });
    }
    let ctx = seq.ctx();
    let weight = MPoly::affine_form(a, S::from_int(1, ctx));
    let weighted = apply_polynomial_weight(seq, &weight, None)?;
    let phi = SeparatingFunction::Fantappie {
        a: a.iter().map(|v| Exact(v.to_rational())).collect(),
    };
    let est = grid_gap_lp(&weighted, &phi, degree, grid)?;
    let m0 = seq.mass().clone();
    Ok(HyperplaneGap {
        value_plus: m0.clone() - est.sup_side,
        value_minus: est.inf_side - m0,
        degree,
        grid_label: est.grid_label,
        certified: false,
    })
}
