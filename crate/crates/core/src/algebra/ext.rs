//! Finite simple extensions R[X]/(m(X)) for a monic modulus m.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::gf::Gf;
use super::poly::Poly;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Modulus data shared by all elements of one extension.
pub struct ExtCtx<R: Ring> {
    modulus: Poly<R>,
    n: usize,
    /// Powers (X^q)^i mod m for i < n, used by the q-Frobenius.
    frob_q: u64,
    frob_pows: Vec<Vec<R>>,
}

impl<R: Ring> fmt::Debug for ExtCtx<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtCtx({:?})", self.modulus)
    }
}

impl<R: Ring> ExtCtx<R> {
    /// Extension by a monic modulus of degree >= 1. `q` is the size of the
    /// base field F_q for the Frobenius x -> x^q.
    pub fn new(modulus: Poly<R>, q: u64) -> Result<Arc<Self>> {
        let n = modulus.degree().ok_or(Error::ZeroPolynomial("extension"))?;
        if n == 0 || !modulus.is_monic() {
            return Err(Error::Precondition("extension modulus must be monic of degree >= 1".into()));
        }
        let zero = modulus.zero_coeff().clone();
        let x = Poly::x(&zero);
        let xq = super::poly::powmod(&x, q, &modulus);
        let mut pows = Vec::with_capacity(n);
        let mut cur = Poly::constant(zero.one_like());
        for _ in 0..n {
            pows.push(pad(&cur, n, &zero));
            cur = (cur * xq.clone()).rem(&modulus).unwrap();
        }
        Ok(Arc::new(ExtCtx { modulus, n, frob_q: q, frob_pows: pows }))
    }

    pub fn degree(&self) -> usize {
        self.n
    }
    pub fn modulus(&self) -> &Poly<R> {
        &self.modulus
    }
    fn zero(&self) -> R {
        self.modulus.zero_coeff().clone()
    }
}

fn pad<R: Ring>(p: &Poly<R>, n: usize, zero: &R) -> Vec<R> {
    let mut v: Vec<R> = p.coeffs().to_vec();
    v.resize(n, zero.clone());
    v
}

/// Element Σ c_i X^i (i < n) of R[X]/(m).
#[derive(Clone)]
pub struct ExtElem<R: Ring> {
    ctx: Arc<ExtCtx<R>>,
    c: Vec<R>,
}

impl<R: Ring> ExtElem<R> {
    pub fn from_coeffs(ctx: &Arc<ExtCtx<R>>, mut c: Vec<R>) -> Self {
        assert!(c.len() <= ctx.n, "too many coordinates");
        c.resize(ctx.n, ctx.zero());
        ExtElem { ctx: ctx.clone(), c }
    }

    pub fn from_poly(ctx: &Arc<ExtCtx<R>>, p: &Poly<R>) -> Self {
        let r = p.rem(&ctx.modulus).expect("monic modulus");
        ExtElem { ctx: ctx.clone(), c: pad(&r, ctx.n, &ctx.zero()) }
    }

    pub fn scalar(ctx: &Arc<ExtCtx<R>>, a: R) -> Self {
        Self::from_coeffs(ctx, vec![a])
    }

    /// The class of X.
    pub fn gen(ctx: &Arc<ExtCtx<R>>) -> Self {
        let z = ctx.zero();
        Self::from_poly(ctx, &Poly::x(&z))
    }

    pub fn zero(ctx: &Arc<ExtCtx<R>>) -> Self {
        Self::from_coeffs(ctx, vec![])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }
    pub fn ctx(&self) -> &Arc<ExtCtx<R>> {
        &self.ctx
    }

    pub fn to_poly(&self) -> Poly<R> {
        Poly::new(self.c.clone(), self.ctx.zero())
    }

    /// Applies a coefficient map (for instance a specialization).
    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        ExtElem { ctx: self.ctx.clone(), c: self.c.iter().map(f).collect() }
    }

    /// Evaluation of the representative polynomial at `x` in an algebra S.
    pub fn eval_at<S: Ring>(&self, x: &S, embed: impl Fn(&R) -> S) -> S {
        self.to_poly().eval_with(x, embed)
    }

    /// Whether the element is R-rational (all higher coordinates vanish).
    pub fn as_scalar(&self) -> Option<R> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &o.ctx) || self.ctx.modulus == o.ctx.modulus,
            "mixed extension rings"
        );
    }
}

impl<R: Ring> PartialEq for ExtElem<R> {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}

impl<R: Ring> fmt::Debug for ExtElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "<")?;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})L^{}", c, i)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ">")
    }
}

impl<R: Ring> Add for ExtElem<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        let c = self.c.into_iter().zip(rhs.c).map(|(a, b)| a + b).collect();
        ExtElem { ctx: self.ctx, c }
    }
}
impl<R: Ring> Sub for ExtElem<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(&rhs);
        let c = self.c.into_iter().zip(rhs.c).map(|(a, b)| a - b).collect();
        ExtElem { ctx: self.ctx, c }
    }
}
impl<R: Ring> Neg for ExtElem<R> {
    type Output = Self;
    fn neg(self) -> Self {
        ExtElem { ctx: self.ctx, c: self.c.into_iter().map(|a| -a).collect() }
    }
}
impl<R: Ring> Mul for ExtElem<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        let n = self.ctx.n;
        let zero = self.ctx.zero();
        let mut prod = vec![zero.clone(); 2 * n - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] = prod[i + j].clone() + a.clone() * b.clone();
            }
        }
        let m = self.ctx.modulus.coeffs();
        for k in (n..prod.len()).rev() {
            let t = prod[k].clone();
            if t.is_zero() {
                continue;
            }
            for i in 0..n {
                if !m[i].is_zero() {
                    prod[k - n + i] = prod[k - n + i].clone() - t.clone() * m[i].clone();
                }
            }
        }
        prod.truncate(n);
        ExtElem { ctx: self.ctx, c: prod }
    }
}

impl<R: Ring> Ring for ExtElem<R> {
    fn zero_like(&self) -> Self {
        ExtElem::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        ExtElem::scalar(&self.ctx, self.ctx.zero().one_like())
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    /// Extended Euclid against the modulus; needs field coefficients.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(a) = self.as_scalar() {
            return a.inv().map(|b| ExtElem::scalar(&self.ctx, b));
        }
        let (g, s, _) = self.to_poly().xgcd(&self.ctx.modulus);
        if g.degree() != Some(0) {
            return None;
        }
        Some(ExtElem::from_poly(&self.ctx, &s))
    }
    fn from_base(&self, c: &Gf) -> Self {
        ExtElem::scalar(&self.ctx, self.ctx.zero().from_base(c))
    }
    /// Σ c_i X^i -> Σ c_i^q (X^q)^i.
    fn frob(&self, q: u64) -> Self {
        if q != self.ctx.frob_q {
            return self.pow(q);
        }
        let n = self.ctx.n;
        let mut out = vec![self.ctx.zero(); n];
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cq = c.frob(q);
            for (j, b) in self.ctx.frob_pows[i].iter().enumerate() {
                if !b.is_zero() {
                    out[j] = out[j].clone() + cq.clone() * b.clone();
                }
            }
        }
        ExtElem { ctx: self.ctx.clone(), c: out }
    }
}
