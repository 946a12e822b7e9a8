//! Dense univariate and sparse multivariate polynomials over a [`Scalar`].

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::multiindex::MultiIndex;
use crate::scalar::{Cx, Scalar};

/// Univariate polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `c t^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k];
        v.push(c);
        Poly::new(v)
    }

    pub fn from_ints(coeffs: &[i64], ctx: &S::Context) -> Self {
        Poly::new(coeffs.iter().map(|&c| S::from_int(c, ctx)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::constant(S::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut out = Poly::zero();
        for c in self.coeffs.iter().rev() {
            out = out.mul(inner).add(&Poly::constant(c.clone()));
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_int(k as i64, &c.context()))
                .collect(),
        )
    }

    pub fn eval(&self, t: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn eval_cx(&self, z: &Cx<S>) -> Cx<S> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(S::zero(), S::zero()), |acc, c| {
                acc * z.clone() + Complex::new(c.clone(), S::zero())
            })
    }

    /// Euclidean division over the scalar field.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor (meaningful in exact mode).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.leading();
        a.scale(&(S::one() / l))
    }

    /// No repeated complex roots (exact mode).
    pub fn is_square_free(&self) -> bool {
        self.degree() == 0 || self.gcd(&self.derivative()).degree() == 0
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`,
    /// via a Sturm sequence. Exact in rational mode.
    pub fn count_real_roots(&self, lo: &S, hi: &S) -> usize {
        let seq = self.sturm_sequence();
        let changes = |x: &S| sign_changes(seq.iter().map(|p| p.eval(x)));
        changes(lo).saturating_sub(changes(hi))
    }

    /// Number of distinct real roots on the whole line.
    pub fn count_all_real_roots(&self) -> usize {
        let seq = self.sturm_sequence();
        let at_neg_inf = seq.iter().map(|p| {
            let l = p.leading();
            if p.degree() % 2 == 1 {
                -l
            } else {
                l
            }
        });
        let at_pos_inf = seq.iter().map(|p| p.leading());
        sign_changes(at_neg_inf).saturating_sub(sign_changes(at_pos_inf))
    }

    fn sturm_sequence(&self) -> Vec<Poly<S>> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(Poly::new(r.coeffs.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        seq
    }

    /// Cauchy bound on the modulus of every root.
    pub fn root_bound(&self) -> S {
        let lead = self.leading().abs();
        let mut m = S::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = c.abs() / lead.clone();
            if r > m {
                m = r;
            }
        }
        m + S::one()
    }
}

fn sign_changes<S: Scalar>(vals: impl Iterator<Item = S>) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for v in vals {
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if let Some(l) = last {
            if l != pos {
                n += 1;
            }
        }
        last = Some(pos);
    }
    n
}

/// Sparse multivariate polynomial in `nvars` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<S> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> MPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (a, c) in terms {
            assert_eq!(a.dim(), nvars, "monomial dimension mismatch");
            p.add_term(a, c);
        }
        p
    }

    /// The coordinate `x_i`.
    pub fn variable(nvars: usize, i: usize, ctx: &S::Context) -> Self {
        MPoly::from_terms(
            nvars,
            [(MultiIndex::axis(nvars, i, 1), S::from_int(1, ctx))],
        )
    }

    /// `sum_i xi_i x_i + offset`.
    pub fn affine_form(xi: &[S], offset: S) -> Self {
        let n = xi.len();
        let mut p = MPoly::constant(n, offset);
        for (i, c) in xi.iter().enumerate() {
            p.add_term(MultiIndex::axis(n, i, 1), c.clone());
        }
        p
    }

    /// Univariate polynomial seen as a polynomial in variable `var`.
    pub fn from_univariate(nvars: usize, var: usize, p: &Poly<S>) -> Self {
        MPoly::from_terms(
            nvars,
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (MultiIndex::axis(nvars, var, k as u32), c.clone())),
        )
    }

    fn add_term(&mut self, a: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(a).or_insert_with(S::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        MPoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(a, v)| (a.clone(), v.clone() * c.clone())),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x.clone() * y.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MPoly::constant(self.nvars, S::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &e) in x.iter().zip(a.exponents()) {
                if e > 0 {
                    m = m * xi.powi(e);
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Substitute `x_i = u_i(t)`.
    pub fn compose_univariate(&self, u: &[Poly<S>]) -> Poly<S> {
        assert_eq!(u.len(), self.nvars);
        let maxe: Vec<u32> = (0..self.nvars)
            .map(|i| {
                self.terms
                    .keys()
                    .map(|a| a.exponents()[i])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let powers: Vec<Vec<Poly<S>>> = u
            .iter()
            .zip(&maxe)
            .map(|(p, &m)| {
                let mut v = vec![Poly::constant(S::one())];
                for k in 1..=m as usize {
                    let next = v[k - 1].mul(p);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero();
        for (a, c) in &self.terms {
            let mut m = Poly::constant(c.clone());
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    m = m.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// `p(x - shift)`.
    pub fn translate(&self, shift: &[S]) -> Self {
        let n = self.nvars;
        let subs: Vec<MPoly<S>> = (0..n)
            .map(|i| {
                let mut p = MPoly::constant(n, -shift[i].clone());
                p.add_term(MultiIndex::axis(n, i, 1), S::one());
                p
            })
            .collect();
        self.substitute(&subs)
    }

    /// `p(s_1(x), ..., s_n(x))` for multivariate substitutions.
    pub fn substitute(&self, subs: &[MPoly<S>]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut out = MPoly::zero(target);
        for (a, c) in &self.terms {
            let mut m = MPoly::constant(target, c.clone());
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    m = m.mul(&subs[i].pow(e));
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// Flip the sign of the listed coordinates.
    pub fn reflect(&self, axes: &[usize]) -> Self {
        MPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(a, c)| {
                let odd = axes.iter().filter(|&&i| a.exponents()[i] % 2 == 1).count();
                let c = if odd % 2 == 1 { -c.clone() } else { c.clone() };
                (a.clone(), c)
            }),
        )
    }
}

impl<S: Scalar> Poly<S> {
    /// Constant `1` anchored in `ctx`.
    pub fn one(ctx: &S::Context) -> Self {
        Poly::constant(S::from_int(1, ctx))
    }

    /// The identity polynomial `t`.
    pub fn t(ctx: &S::Context) -> Self {
        Poly::monomial(S::from_int(1, ctx), 1)
    }
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Poly::zero()
    }
}
