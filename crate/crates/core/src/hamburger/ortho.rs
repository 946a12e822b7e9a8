use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cx_abs_sqr, Cx, Scalar};

use super::Recurrence;

/// Monic first- and second-kind polynomial values at a complex point.
///
/// `q[k] = L_x((pi_k(z) - pi_k(x)) / (z - x))`, so `q[0] = 0`, `q[1] = m_0`
/// and both sequences obey the same recurrence; `-q[k] / p[k]` is the
/// `k`-point Gauss approximation of `int dmu(x) / (x - z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoEval<S: Scalar> {
    pub z: Cx<S>,
    pub p: Vec<Cx<S>>,
    pub q: Vec<Cx<S>>,
}

impl<S: Scalar> OrthoEval<S> {
    /// Orthonormal value `p_k(z) = pi_k(z) / sqrt(h_k)`.
    pub fn orthonormal(&self, rec: &Recurrence<S>, k: usize) -> Cx<S> {
        let s = rec.norms()[k].sqrt();
        Complex::new(self.p[k].re.clone() / s.clone(), self.p[k].im.clone() / s)
    }
}

fn cx<S: Scalar>(re: S, ctx: &S::Context) -> Cx<S> {
    Complex::new(re, S::from_int(0, ctx))
}

/// Evaluate `pi_0..pi_n` and `q_0..q_n` at `z` by forward recurrence;
/// `n` is capped at the recurrence degree.
pub fn ortho_eval<S: Scalar>(rec: &Recurrence<S>, z: &Cx<S>, n: usize) -> OrthoEval<S> {
    let ctx = rec.ctx();
    let n = n.min(rec.degree());
    let z = Complex::new(z.re.in_context(ctx), z.im.in_context(ctx));
    let zero = cx(S::from_int(0, ctx), ctx);
    let mut p = vec![cx(S::from_int(1, ctx), ctx)];
    let mut q = vec![zero.clone()];
    for k in 0..n {
        let shift = z.clone() - cx(rec.b()[k].clone(), ctx);
        let (p_prev, q_prev) = if k == 0 {
            (zero.clone(), cx(S::from_int(-1, ctx), ctx))
        } else {
            (p[k - 1].clone(), q[k - 1].clone())
        };
        let beta = cx(rec.beta()[k].clone(), ctx);
        let pn = shift.clone() * p[k].clone() - beta.clone() * p_prev;
        // q_{-1} = -1 with beta_0 = m_0 gives q_1 = m_0
        let qn = shift * q[k].clone() - beta * q_prev;
        p.push(pn);
        q.push(qn);
    }
    OrthoEval { z, p, q }
}

/// Christoffel function `rho_n(z) = (sum_{k<=n} |pi_k(z)|^2 / h_k)^{-1}`,
/// the minimum of `L(|p|^2)` over `deg p <= n`, `p(z) = 1`.
///
/// For finitely atomic data of rank `r <= n` the value is `0` off the atoms
/// and the atom's weight on them.
pub fn christoffel<S: Scalar>(rec: &Recurrence<S>, z: &Cx<S>, n: usize) -> Result<S> {
    Ok(christoffel_chain(rec, z, n)?
        .pop()
        .expect("non-empty chain"))
}

/// `rho_0(z), ..., rho_n(z)`.
pub fn christoffel_chain<S: Scalar>(rec: &Recurrence<S>, z: &Cx<S>, n: usize) -> Result<Vec<S>> {
    let ctx = rec.ctx();
    let available = match rec.rank() {
        Some(_) => usize::MAX,
        None => rec.degree(),
    };
    if n > available {
        return Err(Error::DegreeInsufficient {
            needed: 2 * n,
            available: 2 * rec.degree(),
        });
    }
    let ev = ortho_eval(rec, z, n);
    let mut sum = S::from_int(0, ctx);
    let mut out = Vec::with_capacity(n + 1);
    let mut collapsed = false;
    for k in 0..=n {
        if collapsed {
            out.push(S::from_int(0, ctx));
            continue;
        }
        if rec.rank() == Some(k) {
            // pi_r vanishes on the support; p = pi_r / pi_r(z) has norm zero
            if !cx_abs_sqr(&ev.p[k]).is_zero() {
                collapsed = true;
                out.push(S::from_int(0, ctx));
                continue;
            }
        }
        if k < ev.p.len() && !rec.norms()[k].is_zero() {
            sum = sum + cx_abs_sqr(&ev.p[k]) / rec.norms()[k].clone();
        }
        out.push(S::from_int(1, ctx) / sum.clone());
    }
    Ok(out)
}

/// Weyl disk of Cauchy-transform values `int dmu / (x - z)` over all
/// measures sharing the moments `m_0..m_{2n+2}`.
///
/// The boundary is traced by the quasi-orthogonal pencil of degree `n + 2`,
/// `pi^{(c)} = (x - c) pi_{n+1} - beta_{n+1} pi_n`, `c in R u {inf}`; the
/// circle is the circumcircle of `c = 0, 1, inf`. The closed form
/// `rho_{n+1}(z) / (2 |Im z|)` is kept as a cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylDisk<S: Scalar> {
    pub z: Cx<S>,
    pub degree: usize,
    pub center: Cx<S>,
    /// Squared radius, exact in rational mode.
    pub radius_sq: S,
    /// Squared closed-form radius `(rho_{n+1}(z) / (2 |Im z|))^2`.
    pub closed_form_radius_sq: S,
}

impl<S: Scalar> WeylDisk<S> {
    pub fn radius(&self) -> S {
        if self.radius_sq.is_zero() {
            return self.radius_sq.clone();
        }
        self.radius_sq.sqrt()
    }

    pub fn diameter(&self) -> S {
        let r = self.radius();
        r.clone() + r
    }

    /// Whether `w` lies in the closed disk.
    pub fn contains(&self, w: &Cx<S>, rel_tol: f64) -> bool {
        let d = cx_abs_sqr(&(w.clone() - self.center.clone()));
        if S::is_exact() {
            return d <= self.radius_sq;
        }
        d.to_f64()
            <= self.radius_sq.to_f64() * (1.0 + rel_tol)
                + rel_tol * cx_abs_sqr(&self.center).to_f64()
    }
}

fn circumcircle<S: Scalar>(a: &Cx<S>, b: &Cx<S>, c: &Cx<S>) -> Option<(Cx<S>, S)> {
    let bp = b.clone() - a.clone();
    let cp = c.clone() - a.clone();
    let two = S::from_int(2, &a.re.context());
    let d = two * (bp.re.clone() * cp.im.clone() - bp.im.clone() * cp.re.clone());
    if d.is_zero() {
        return None;
    }
    let b2 = cx_abs_sqr(&bp);
    let c2 = cx_abs_sqr(&cp);
    let ux = (cp.im.clone() * b2.clone() - bp.im.clone() * c2.clone()) / d.clone();
    let uy = (bp.re.clone() * c2 - cp.re.clone() * b2) / d;
    let radius_sq = ux.clone() * ux.clone() + uy.clone() * uy.clone();
    Some((
        Complex::new(a.re.clone() + ux, a.im.clone() + uy),
        radius_sq,
    ))
}

pub fn weyl_disk<S: Scalar>(rec: &Recurrence<S>, z: &Cx<S>, n: usize) -> Result<WeylDisk<S>> {
    let ctx = rec.ctx();
    if z.im.is_zero() {
        return Err(Error::NonRealPointRequired);
    }
    let im = z.im.in_context(ctx);
    let four_im2 = S::from_int(4, ctx) * im.clone() * im;
    // finitely atomic data: the moments pin the measure, the disk is a point
    if let Some(r) = rec.rank() {
        if r <= n + 1 {
            let ev = ortho_eval(rec, z, r);
            let center = -(ev.q[r].clone() / ev.p[r].clone());
            return Ok(WeylDisk {
                z: ev.z,
                degree: n,
                center,
                radius_sq: S::from_int(0, ctx),
                closed_form_radius_sq: S::from_int(0, ctx),
            });
        }
    }
    if n + 1 > rec.degree() {
        return Err(Error::DegreeInsufficient {
            needed: 2 * n + 2,
            available: 2 * rec.degree(),
        });
    }
    let ev = ortho_eval(rec, z, n + 1);
    let (p1, p0) = (ev.p[n + 1].clone(), ev.p[n].clone());
    let (q1, q0) = (ev.q[n + 1].clone(), ev.q[n].clone());
    let beta = cx(rec.beta()[n + 1].clone(), ctx);
    let point = |c: Option<i64>| -> Cx<S> {
        match c {
            None => -(q1.clone() / p1.clone()),
            Some(c) => {
                let shift = ev.z.clone() - cx(S::from_int(c, ctx), ctx);
                let num = shift.clone() * q1.clone() - beta.clone() * q0.clone();
                let den = shift * p1.clone() - beta.clone() * p0.clone();
                -(num / den)
            }
        }
    };
    let (w0, w1, winf) = (point(Some(0)), point(Some(1)), point(None));
    let (center, radius_sq) =
        circumcircle(&w0, &w1, &winf).ok_or(Error::DegeneratePencil { degree: n })?;
    let rho = christoffel(rec, z, n + 1)?;
    let closed_form_radius_sq = rho.clone() * rho / four_im2;
    Ok(WeylDisk {
        z: ev.z,
        degree: n,
        center,
        radius_sq,
        closed_form_radius_sq,
    })
}
