use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::Scalar;

use super::{recurrence_from_moments, require_1d};

/// Bracket of the Stieltjes transform `int dmu(x) / (x - z)` at `z < 0`.
///
/// With the S-fraction `m_0 / (w + c_1 / (1 + c_2 / (w + c_3 / ...)))`,
/// `w = -z`, odd convergents are lower bounds and even ones upper bounds;
/// level `n` pairs `f_{2n-1}` with `f_{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StieltjesLevel<S: Scalar> {
    pub level: usize,
    pub lower: S,
    pub upper: S,
    pub width: S,
}

impl<S: Scalar> Serialize for StieltjesLevel<S> {
    fn serialize<Ser: serde::Serializer>(
        &self,
        s: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StieltjesLevel", 4)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("lower", &self.lower.to_f64())?;
        st.serialize_field("upper", &self.upper.to_f64())?;
        st.serialize_field("width", &self.width.to_f64())?;
        st.end()
    }
}

/// S-fraction coefficients from the monic recurrence:
/// `b_k = c_{2k} + c_{2k+1}`, `beta_k = c_{2k-1} c_{2k}`. A zero coefficient
/// ends the fraction (finitely atomic data or an atom at the origin).
fn s_fraction<S: Scalar>(b: &[S], beta: &[S], count: usize) -> Result<Vec<S>> {
    let mut c: Vec<S> = Vec::with_capacity(count);
    for j in 1..=count {
        let v = if j == 1 {
            b[0].clone()
        } else if j % 2 == 0 {
            let k = j / 2;
            beta[k].clone() / c[j - 2].clone()
        } else {
            let k = (j - 1) / 2;
            b[k].clone() - c[j - 2].clone()
        };
        if v.is_negative() {
            return Err(Error::NotStieltjesAdmissible { index: j });
        }
        if v.is_zero() {
            // an odd zero forces an atom at the origin and nothing else
            if j % 2 == 1 && beta.get(j.div_ceil(2)).is_some_and(|x| !x.is_zero()) {
                return Err(Error::NotStieltjesAdmissible { index: j });
            }
            c.push(v);
            break;
        }
        c.push(v);
    }
    Ok(c)
}

/// Convergent using `c_1..c_j` (fewer if the fraction terminated).
fn convergent<S: Scalar>(m0: &S, w: &S, c: &[S], j: usize) -> S {
    let j = j.min(c.len());
    let one = S::from_int(1, &m0.context());
    let lead = |i: usize| {
        if i.is_multiple_of(2) {
            w.clone()
        } else {
            one.clone()
        }
    };
    let mut d = lead(j);
    for i in (0..j).rev() {
        d = lead(i) + c[i].clone() / d;
    }
    m0.clone() / d
}

/// Brackets at levels `1..=n`; needs moments through `2n` and a conic
/// support hint.
pub fn stieltjes_convergents<S: Scalar>(
    seq: &MomentSequence<S>,
    z: &S,
    n: usize,
) -> Result<Vec<StieltjesLevel<S>>> {
    require_1d(seq)?;
    if !seq.support().is_conic() {
        return Err(Error::WrongSupport(
            "Stieltjes convergents need support in the nonnegative half-line".into(),
        ));
    }
    if !z.is_negative() {
        return Err(Error::InvalidParameter(
            "Stieltjes point z must be negative".into(),
        ));
    }
    let rec = recurrence_from_moments(seq, n)?;
    let ctx = seq.ctx();
    let mut b = rec.b().to_vec();
    let beta = rec.beta();
    // b_k is only used once beta_k > 0; pad so indexing stays total
    while b.len() < beta.len() {
        b.push(S::from_int(0, ctx));
    }
    let available = match rec.rank() {
        Some(_) => 2 * n,
        None => 2 * rec.degree(),
    };
    let c = s_fraction(&b, beta, available.min(2 * n))?;
    let w = -z.in_context(ctx);
    let m0 = seq.mass().clone();
    (1..=n)
        .map(|level| {
            let lower = convergent(&m0, &w, &c, 2 * level - 1);
            let upper = convergent(&m0, &w, &c, 2 * level);
            let width = upper.clone() - lower.clone();
            if width.is_negative() && S::is_exact() {
                return Err(Error::NotStieltjesAdmissible { index: 2 * level });
            }
            Ok(StieltjesLevel {
                level,
                lower,
                upper,
                width,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{generate_moments, Exact, MeasureDefinition, SupportHint};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    /// Independent oracle: evaluate the S-fraction of the exponential law
    /// with the classical coefficients c_{2k-1} = c_{2k} = k.
    fn exponential_convergent(j: usize) -> Q {
        let coeff = |i: usize| q(i.div_ceil(2) as i64);
        // at w = 1 every partial denominator leads with 1
        let mut d = q(1);
        for i in (0..j).rev() {
            d = q(1) + coeff(i + 1) / d;
        }
        q(1) / d
    }

    #[test]
    fn dirac_at_one() {
        let d = MomentSequence::from_values(vec![q(1); 9], (), SupportHint::NonnegativeOrthant)
            .unwrap();
        for l in stieltjes_convergents(&d, &q(-1), 4).unwrap() {
            assert_eq!(l.lower, Q::new(1.into(), 2.into()));
            assert_eq!(l.upper, l.lower);
            assert_eq!(l.width, q(0));
        }
    }

    #[test]
    fn exponential_widths_shrink_to_zero() {
        let e = generate_moments::<Q>(&MeasureDefinition::Exponential1D, 1, 40, ()).unwrap();
        let levels = stieltjes_convergents(&e, &q(-1), 20).unwrap();
        for l in &levels {
            assert_eq!(l.lower, exponential_convergent(2 * l.level - 1));
            assert_eq!(l.upper, exponential_convergent(2 * l.level));
        }
        for w in levels.windows(2) {
            assert!(w[1].lower >= w[0].lower && w[1].upper <= w[0].upper);
            assert!(w[1].width < w[0].width);
        }
        assert!(levels[19].width.to_f64() < 1e-3 * levels[0].width.to_f64());
    }

    #[test]
    fn q_lattice_widths_plateau() {
        let l = generate_moments::<Q>(&MeasureDefinition::QLattice1D { q: Exact(q(2)) }, 1, 24, ())
            .unwrap();
        let levels = stieltjes_convergents(&l, &q(-1), 12).unwrap();
        for w in levels.windows(2) {
            assert!(w[1].lower >= w[0].lower && w[1].upper <= w[0].upper);
            assert!(w[1].width > q(0));
        }
        let ratio = levels[11].width.to_f64() / levels[5].width.to_f64();
        assert!(ratio > 0.5, "ratio {ratio}");
    }

    #[test]
    fn rejects_full_line_and_negative_coefficients() {
        let g = generate_moments::<Q>(
            &MeasureDefinition::GaussianProduct {
                variances: vec![Exact(q(1))],
            },
            1,
            8,
            (),
        )
        .unwrap();
        assert!(matches!(
            stieltjes_convergents(&g, &q(-1), 2),
            Err(Error::WrongSupport(_))
        ));
        let on_half_line = g.with_support(SupportHint::NonnegativeOrthant);
        assert!(matches!(
            stieltjes_convergents(&on_half_line, &q(-1), 2),
            Err(Error::NotStieltjesAdmissible { index: 1 })
        ));
    }
}
