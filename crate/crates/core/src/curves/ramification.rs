//! Ramification loci of polynomial parametrizations.
//!
//! A parameter `t` ramifies when some `s` (possibly `s = t`) gives
//! `D_i(s, t) = (u_i(s) - u_i(t)) / (s - t) = 0` for every component: either
//! two parameters share an image, or the velocity `u'(t)` vanishes. Common
//! roots are found by eliminating `s` with a Sylvester resultant over `Q[t]`
//! and isolating the real roots with Sturm sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;

use super::PolynomialCurve;

type Q = BigRational;
/// Polynomial in `s` whose coefficients are polynomials in `t`.
type Bivariate = Vec<Poly<Q>>;

/// Derived ramification data.
#[derive(Clone, Debug, PartialEq)]
pub struct Ramification {
    /// Ramified parameters in increasing order (exact when rational, else
    /// isolated to within `2^-120`).
    pub parameters: Vec<Q>,
    /// Witness pairs `(s, t)` with `u(s) = u(t)` or `s = t`, `u'(t) = 0`.
    pub pairs: Vec<(Q, Q)>,
    /// Eliminant in `t` whose real roots contain the parameters.
    pub eliminant: Poly<Q>,
}

fn divided_difference(u: &Poly<Q>) -> Bivariate {
    // (s^k - t^k)/(s - t) = sum_{j<k} s^j t^{k-1-j}
    let deg = u.degree();
    let mut out = vec![Poly::zero(); deg.max(1)];
    for k in 1..=deg {
        let c = u.coeff(k);
        if c.is_zero() {
            continue;
        }
        for j in 0..k {
            let term = Poly::monomial(c.clone(), k - 1 - j);
            out[j] = out[j].add(&term);
        }
    }
    while out.len() > 1 && out.last().is_some_and(Poly::is_zero) {
        out.pop();
    }
    out
}

fn s_degree(p: &Bivariate) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn exact_div(a: &Poly<Q>, b: &Poly<Q>) -> Poly<Q> {
    let (q, r) = a.div_rem(b);
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    q
}

/// Determinant over `Q[t]` by fraction-free elimination.
fn determinant(mut m: Vec<Vec<Poly<Q>>>) -> Poly<Q> {
    let n = m.len();
    let mut prev = Poly::constant(Q::one());
    let mut negate = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = exact_div(&v, &prev);
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.scale(&-Q::one())
    } else {
        det
    }
}

/// `Res_s(a, b)` as a polynomial in `t`.
fn resultant(a: &Bivariate, b: &Bivariate) -> Poly<Q> {
    let (m, n) = (s_degree(a), s_degree(b));
    if m == 0 && n == 0 {
        return Poly::constant(Q::one());
    }
    if m == 0 {
        return a[0].pow(n as u32);
    }
    if n == 0 {
        return b[0].pow(m as u32);
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![Poly::zero(); size];
        for (k, c) in a.iter().take(m + 1).enumerate() {
            row[shift + m - k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![Poly::zero(); size];
        for (k, c) in b.iter().take(n + 1).enumerate() {
            row[shift + n - k] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

fn square_free_part(p: &Poly<Q>) -> Poly<Q> {
    let g = p.gcd(&p.derivative());
    if g.degree() == 0 {
        return p.clone();
    }
    exact_div(p, &g)
}

/// Real roots of `p`, exact when hit, otherwise midpoints of isolating
/// intervals narrower than `2^-bits`.
pub(crate) fn real_roots(p: &Poly<Q>, bits: usize) -> Vec<Q> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let p = square_free_part(p);
    let bound = p.root_bound() + Q::one();
    let width = Q::new(BigInt::one(), BigInt::one() << bits);
    let two = Q::from_integer(2.into());
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let count = p.count_real_roots(&lo, &hi);
        if count == 0 {
            continue;
        }
        if p.eval(&hi).is_zero() && count == 1 {
            out.push(hi);
            continue;
        }
        if count == 1 && &hi - &lo < width {
            out.push((&lo + &hi) / &two);
            continue;
        }
        let mid = (&lo + &hi) / &two;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort();
    out
}

fn eval_at_t(p: &Bivariate, t: &Q) -> Poly<Q> {
    Poly::new(p.iter().map(|c| c.eval(t)).collect())
}

fn close(a: &Q, b: &Q, tol: &Q) -> bool {
    (a - b).abs() <= *tol
}

/// Compute the ramified parameters of a planar or spatial curve.
pub fn derive_ramification(curve: &PolynomialCurve) -> Result<Ramification> {
    let diffs: Vec<Bivariate> = curve
        .components()
        .iter()
        .filter(|u| u.degree() > 0)
        .map(divided_difference)
        .collect();
    let empty = || Ramification {
        parameters: Vec::new(),
        pairs: Vec::new(),
        eliminant: Poly::constant(Q::one()),
    };
    // A linear component has a nonzero constant divided difference.
    if diffs.iter().any(|d| s_degree(d) == 0 && d[0].degree() == 0) {
        return Ok(empty());
    }
    if diffs.len() < 2 {
        return Err(Error::InvalidCurve(
            "ramification needs at least two non-constant components".into(),
        ));
    }
    let mut eliminant: Option<Poly<Q>> = None;
    for other in &diffs[1..] {
        let r = resultant(&diffs[0], other);
        if r.is_zero() {
            continue;
        }
        eliminant = Some(match eliminant {
            None => r,
            Some(e) => e.gcd(&r),
        });
    }
    let eliminant = eliminant.ok_or_else(|| {
        Error::InvalidCurve(
            "divided differences share a factor: parametrization is not proper".into(),
        )
    })?;
    let tol = Q::new(BigInt::one(), BigInt::one() << 80usize);
    let mut params: Vec<Q> = Vec::new();
    let mut pairs = Vec::new();
    for t in real_roots(&eliminant, 120) {
        let first = eval_at_t(&diffs[0], &t);
        let candidates = if first.is_zero() {
            vec![t.clone()]
        } else {
            real_roots(&first, 120)
        };
        for s in candidates {
            let all_vanish = diffs.iter().all(|d| {
                let v = eval_at_t(d, &t).eval(&s);
                v.abs() <= tol
            });
            if !all_vanish {
                continue;
            }
            pairs.push((s.clone(), t.clone()));
            for p in [&s, &t] {
                if !params.iter().any(|q| close(q, p, &tol)) {
                    params.push(p.clone());
                }
            }
        }
    }
    params.sort();
    Ok(Ramification {
        parameters: params,
        pairs,
        eliminant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{catalog_curve, PolynomialCurve};
    use crate::scalar::Scalar;

    fn qi(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn params(name: &str) -> Vec<f64> {
        let c = catalog_curve(name, None).unwrap();
        derive_ramification(&c)
            .unwrap()
            .parameters
            .iter()
            .map(Scalar::to_f64)
            .collect()
    }

    #[test]
    fn parabola_is_unramified() {
        assert!(params("parabola").is_empty());
    }

    #[test]
    fn nodal_cubic_node_parameters() {
        assert_eq!(params("nodal_cubic"), vec![-1.0, 1.0]);
    }

    #[test]
    fn ramphoid_cusp_at_zero() {
        assert_eq!(params("ramphoid_quartic"), vec![0.0]);
    }

    #[test]
    fn quintic_double_point() {
        let r = 5f64.powf(0.25);
        let p = params("lhospital_quintic");
        assert_eq!(p.len(), 2);
        assert!((p[0] + r).abs() < 1e-15 && (p[1] - r).abs() < 1e-15);
    }

    #[test]
    fn catalog_g_agrees_with_derivation() {
        for name in [
            "parabola",
            "nodal_cubic",
            "ramphoid_quartic",
            "lhospital_quintic",
        ] {
            let c = catalog_curve(name, Some(Q::new(3.into(), 2.into()))).unwrap();
            let derived = derive_ramification(&c).unwrap().parameters;
            assert_eq!(derived.len(), c.ramification().len(), "{name}");
            for (a, b) in derived.iter().zip(c.ramification()) {
                assert!((a.to_f64() - b.to_f64()).abs() < 1e-15, "{name}");
            }
        }
    }

    #[test]
    fn resultant_of_linear_forms() {
        // Res_s(s - t, s + t) = 2t (up to sign)
        let a = vec![Poly::new(vec![qi(0), qi(-1)]), Poly::constant(qi(1))];
        let b = vec![Poly::new(vec![qi(0), qi(1)]), Poly::constant(qi(1))];
        let r = resultant(&a, &b);
        assert_eq!(r.degree(), 1);
        assert!(r.eval(&qi(0)).is_zero());
    }

    #[test]
    fn non_proper_parametrization_is_rejected() {
        let t2 = Poly::new(vec![qi(0), qi(0), qi(1)]);
        let c = PolynomialCurve::new(
            "double",
            vec![t2.clone(), t2.pow(2)],
            vec![],
            vec![],
            Poly::constant(qi(1)),
        )
        .unwrap();
        assert!(derive_ramification(&c).is_err());
    }
}
