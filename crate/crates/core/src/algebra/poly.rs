//! Dense univariate polynomials over an exact ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gf::Gf;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Polynomial Σ c_i X^i, little-endian, without trailing zeros.
///
/// A zero coefficient is kept as a template so that constants of the
/// coefficient ring can be created even for the zero polynomial.
#[derive(Clone)]
pub struct Poly<R: Ring> {
    coeffs: Vec<R>,
    zero: R,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>, zero: R) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        let zero = zero.zero_like();
        Poly { coeffs, zero }
    }

    /// Builds from a nonempty coefficient list.
    pub fn from_coeffs(coeffs: Vec<R>) -> Self {
        let zero = coeffs.first().expect("nonempty coefficient list").zero_like();
        Self::new(coeffs, zero)
    }

    pub fn zero(template: &R) -> Self {
        Poly { coeffs: Vec::new(), zero: template.zero_like() }
    }

    pub fn constant(c: R) -> Self {
        let zero = c.zero_like();
        Self::new(vec![c], zero)
    }

    /// The monomial c X^n.
    pub fn monomial(c: R, n: usize) -> Self {
        let zero = c.zero_like();
        let mut v = vec![zero.clone(); n];
        v.push(c);
        Self::new(v, zero)
    }

    /// The variable X.
    pub fn x(template: &R) -> Self {
        Self::monomial(template.one_like(), 1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn zero_coeff(&self) -> &R {
        &self.zero
    }

    /// Coefficient of X^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().map_or(false, |c| c.is_one())
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.zero.clone())
    }

    pub fn shift(&self, n: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![self.zero.clone(); n];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v, zero: self.zero.clone() }
    }

    /// Horner evaluation at an element of an algebra over the coefficients.
    pub fn eval_with<S: Ring>(&self, x: &S, embed: impl Fn(&R) -> S) -> S {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + embed(c);
        }
        acc
    }

    pub fn eval(&self, x: &R) -> R {
        self.eval_with(x, |c| c.clone())
    }

    /// Applies a map to all coefficients.
    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect(), zero.zero_like())
    }

    /// Division with remainder by a polynomial with unit leading coefficient.
    pub fn divrem(&self, b: &Self) -> Result<(Self, Self)> {
        let db = b.degree().ok_or(Error::ZeroPolynomial("inverse for division"))?;
        let linv = b.lead().unwrap().inv().ok_or_else(|| Error::NotUnit("leading coefficient of divisor".into()))?;
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= db {
            return Ok((Self::zero(&self.zero), self.clone()));
        }
        let mut q = vec![self.zero.clone(); n - db];
        for k in (db..n).rev() {
            let c = r[k].clone();
            if c.is_zero() {
                continue;
            }
            let t = c * linv.clone();
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[k - db + i] = r[k - db + i].clone() - t.clone() * bc.clone();
            }
            q[k - db] = t;
        }
        r.truncate(db);
        Ok((Self::new(q, self.zero.clone()), Self::new(r, self.zero.clone())))
    }

    /// Exact quotient; fails if the remainder is nonzero.
    pub fn div_exact(&self, b: &Self) -> Result<Self> {
        let (q, r) = self.divrem(b)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn rem(&self, b: &Self) -> Result<Self> {
        Ok(self.divrem(b)?.1)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let mut v = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut s = self.zero.clone();
            // i·c by repeated addition; the characteristic keeps this small
            let mut k = i;
            let mut base = c.clone();
            while k > 0 {
                if k & 1 == 1 {
                    s = s + base.clone();
                }
                base = base.clone() + base;
                k >>= 1;
            }
            v.push(s);
        }
        Self::new(v, self.zero.clone())
    }

    /// Substitutes X -> X^k.
    pub fn inflate(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![self.zero.clone(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Poly { coeffs: v, zero: self.zero.clone() }
    }
}

impl<R: Ring> Poly<R>
where
    R: Ring,
{
    /// Monic associate (requires a unit leading coefficient).
    pub fn monic(&self) -> Result<Self> {
        match self.lead() {
            None => Err(Error::ZeroPolynomial("monic associate")),
            Some(l) => {
                let inv = l.inv().ok_or_else(|| Error::NotUnit("leading coefficient".into()))?;
                Ok(self.scale(&inv))
            }
        }
    }

    /// Monic gcd over a field.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("field coefficients");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic().expect("field coefficients")
        }
    }

    /// Extended Euclid over a field: (g, s, t) with s·a + t·b = g monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let z = self.zero.clone();
        let one = Poly::constant(z.one_like());
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), Poly::zero(&z));
        let (mut t0, mut t1) = (Poly::zero(&z), one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("field coefficients");
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0 - q.clone() * s1.clone();
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0 - q * t1.clone();
            t0 = std::mem::replace(&mut t1, t2);
        }
        if let Some(l) = r0.lead().cloned() {
            let li = l.inv().expect("field coefficients");
            (r0.scale(&li), s0.scale(&li), t0.scale(&li))
        } else {
            (r0, s0, t0)
        }
    }
}

impl Poly<Gf> {
    /// Polynomial over F_q from integer indices of its coefficients.
    pub fn from_indices(ctx: &std::sync::Arc<super::gf::GfCtx>, idx: &[u32]) -> Self {
        Poly::new(idx.iter().map(|&i| Gf::from_index(ctx, i)).collect(), Gf::zero(ctx))
    }

    pub fn indices(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.index()).collect()
    }

    /// Irreducibility over a finite field by Rabin-style gcd checks.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        let f = match self.monic() {
            Ok(f) => f,
            Err(_) => return false,
        };
        let q = self.zero.ctx().size();
        let x = Poly::x(&self.zero);
        // x^{q^k} mod f for k = 1..n
        let mut xp = x.clone();
        for k in 1..=n {
            xp = powmod(&xp, q, &f);
            if k < n && !(xp.clone() - x.clone()).gcd(&f).is_one_poly() {
                return false;
            }
        }
        xp == x.rem(&f).unwrap()
    }

    fn is_one_poly(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Monic irreducible factors with multiplicity, by trial division.
    pub fn factor_trial(&self) -> Vec<(Poly<Gf>, u32)> {
        let mut out = Vec::new();
        let mut rest = match self.monic() {
            Ok(f) => f,
            Err(_) => return out,
        };
        let ctx = self.zero.ctx().clone();
        let q = ctx.size();
        let mut d = 1usize;
        while rest.degree().unwrap_or(0) >= 1 {
            if 2 * d > rest.degree().unwrap() {
                out.push((rest.clone(), 1));
                break;
            }
            let count = q.pow(d as u32);
            for low in 0..count {
                let mut c = Vec::with_capacity(d + 1);
                let mut v = low;
                for _ in 0..d {
                    c.push(Gf::from_index(&ctx, (v % q) as u32));
                    v /= q;
                }
                c.push(Gf::one(&ctx));
                let g = Poly::new(c, Gf::zero(&ctx));
                if !g.is_irreducible() {
                    continue;
                }
                let mut e = 0;
                loop {
                    let (qq, r) = rest.divrem(&g).unwrap();
                    if !r.is_zero() {
                        break;
                    }
                    rest = qq;
                    e += 1;
                }
                if e > 0 {
                    out.push((g, e));
                }
            }
            d += 1;
        }
        // merge a remaining factor equal to one already found
        let mut merged: Vec<(Poly<Gf>, u32)> = Vec::new();
        for (g, e) in out {
            if let Some(m) = merged.iter_mut().find(|(h, _)| *h == g) {
                m.1 += e;
            } else {
                merged.push((g, e));
            }
        }
        merged
    }
}

/// a^e mod m.
pub fn powmod<R: Ring>(a: &Poly<R>, mut e: u64, m: &Poly<R>) -> Poly<R> {
    let mut base = a.rem(m).expect("unit leading coefficient");
    let mut acc = Poly::constant(a.zero.one_like()).rem(m).unwrap();
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc * base.clone()).rem(m).unwrap();
        }
        e >>= 1;
        if e > 0 {
            base = (base.clone() * base).rem(m).unwrap();
        }
    }
    acc
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring + Eq> Eq for Poly<R> {}

impl<R: Ring + std::hash::Hash> std::hash::Hash for Poly<R> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({:?})", c)?,
                1 => write!(f, "({:?})X", c)?,
                _ => write!(f, "({:?})X^{}", c, i)?,
            }
        }
        Ok(())
    }
}

impl<R: Ring> Add for Poly<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (mut long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        for (i, c) in short.coeffs.into_iter().enumerate() {
            long.coeffs[i] = long.coeffs[i].clone() + c;
        }
        Poly::new(long.coeffs, long.zero)
    }
}

impl<R: Ring> Neg for Poly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect(), zero: self.zero }
    }
}

impl<R: Ring> Sub for Poly<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<R: Ring> Mul for Poly<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero(&self.zero);
        }
        let mut v = vec![self.zero.clone(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v, self.zero)
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero_like(&self) -> Self {
        Poly::zero(&self.zero)
    }
    fn one_like(&self) -> Self {
        Poly::constant(self.zero.one_like())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn inv(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            self.coeffs[0].inv().map(Poly::constant)
        } else {
            None
        }
    }
    fn from_base(&self, c: &Gf) -> Self {
        Poly::constant(self.zero.from_base(c))
    }
    /// (Σ c_i X^i)^q = Σ c_i^q X^{qi} in characteristic p.
    fn frob(&self, q: u64) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let k = q as usize;
        let mut v = vec![self.zero.clone(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.frob(q);
        }
        Poly::new(v, self.zero.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::FieldTower;

    fn f3() -> std::sync::Arc<crate::algebra::gf::GfCtx> {
        FieldTower::new(3, 1, 1).unwrap().base
    }

    #[test]
    fn degree_and_arith() {
        let k = f3();
        let a = Poly::from_indices(&k, &[1, 0, 1]);
        let b = Poly::from_indices(&k, &[2, 1]);
        assert_eq!((a.clone() * b.clone()).degree(), Some(3));
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q * b + r, a);
        assert_eq!(Poly::<Gf>::zero(&Gf::zero(&k)).degree(), None);
    }

    #[test]
    fn frob_is_qth_power() {
        let k = f3();
        let a = Poly::from_indices(&k, &[1, 2, 0, 1]);
        assert_eq!(a.frob(3), a.pow(3));
    }

    #[test]
    fn irreducibility_and_factoring() {
        let k = f3();
        assert!(Poly::from_indices(&k, &[1, 0, 1]).is_irreducible());
        assert!(!Poly::from_indices(&k, &[0, 0, 1]).is_irreducible());
        assert!(!Poly::from_indices(&k, &[2, 0, 1]).is_irreducible());
        let f = Poly::from_indices(&k, &[0, 0, 1]);
        let fac = f.factor_trial();
        assert_eq!(fac, vec![(Poly::from_indices(&k, &[0, 1]), 2)]);
        let g = Poly::from_indices(&k, &[2, 0, 1]);
        assert_eq!(g.factor_trial().len(), 2);
    }

    #[test]
    fn xgcd_bezout() {
        let k = f3();
        let a = Poly::from_indices(&k, &[1, 0, 1]);
        let b = Poly::from_indices(&k, &[0, 1, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s * a + t * b, g.clone());
        assert!(g.is_one());
    }
}
