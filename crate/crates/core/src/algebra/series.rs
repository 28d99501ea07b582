//! Truncated Laurent series in one variable with absolute precision.
//!
//! `Series { low, c, prec }` stands for Σ c_i x^{low+i} + O(x^prec). An
//! exact series (a Laurent polynomial) has `prec = None`. Arithmetic only
//! ever returns coefficients below the tracked precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gf::Gf;
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Series<R: Ring> {
    low: i64,
    c: Vec<R>,
    prec: Option<i64>,
    zero: R,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<R: Ring> Series<R> {
    /// Σ coeffs[i] x^{low+i} + O(x^prec), normalized.
    pub fn new(low: i64, coeffs: Vec<R>, prec: Option<i64>, zero: &R) -> Self {
        let mut s = Series { low, c: coeffs, prec, zero: zero.zero_like() };
        s.normalize();
        s
    }

    pub fn exact(low: i64, coeffs: Vec<R>, zero: &R) -> Self {
        Self::new(low, coeffs, None, zero)
    }

    /// A power series given to absolute precision `prec`.
    pub fn power(coeffs: Vec<R>, prec: i64, zero: &R) -> Self {
        Self::new(0, coeffs, Some(prec), zero)
    }

    pub fn scalar(c: R) -> Self {
        let z = c.zero_like();
        Self::new(0, vec![c], None, &z)
    }

    /// c x^k, exact.
    pub fn monomial(c: R, k: i64) -> Self {
        let z = c.zero_like();
        Self::new(k, vec![c], None, &z)
    }

    /// O(x^n).
    pub fn big_o(n: i64, zero: &R) -> Self {
        Series { low: n, c: Vec::new(), prec: Some(n), zero: zero.zero_like() }
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.low).max(0) as usize;
            if self.c.len() > keep {
                self.c.truncate(keep);
            }
        }
        while self.c.last().map_or(false, |x| x.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().position(|x| !x.is_zero());
        match lead {
            None => {
                self.c.clear();
                self.low = self.prec.unwrap_or(0);
            }
            Some(k) if k > 0 => {
                self.c.drain(..k);
                self.low += k as i64;
            }
            _ => {}
        }
    }

    /// Exponent of the first stored coefficient (the valuation when one is known).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Stored coefficients of x^low, x^{low+1}, ...
    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Valuation, `None` if no nonzero coefficient is known.
    pub fn valuation(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.low)
        }
    }

    /// Lower bound for the valuation: the valuation, or the precision of
    /// an indeterminate zero. `None` for the exact zero.
    pub fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    /// Lowest nonzero coefficient.
    pub fn lead(&self) -> Option<&R> {
        self.c.first()
    }

    pub fn zero_coeff(&self) -> &R {
        &self.zero
    }

    /// Coefficient of x^k. Panics when k is at or beyond the precision.
    pub fn coeff(&self, k: i64) -> R {
        if let Some(p) = self.prec {
            assert!(k < p, "coefficient x^{k} beyond precision {p}");
        }
        self.coeff_unchecked(k)
    }

    /// Coefficient of x^k, or `None` when unknown.
    pub fn coeff_checked(&self, k: i64) -> Option<R> {
        match self.prec {
            Some(p) if k >= p => None,
            _ => Some(self.coeff_unchecked(k)),
        }
    }

    fn coeff_unchecked(&self, k: i64) -> R {
        if k < self.low {
            return self.zero.clone();
        }
        self.c.get((k - self.low) as usize).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Known coefficients with their exponents.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        let low = self.low;
        self.c.iter().enumerate().map(move |(i, c)| (low + i as i64, c))
    }

    /// Exponent just past the last stored coefficient.
    pub fn top(&self) -> i64 {
        self.low + self.c.len() as i64
    }

    /// Lowers the precision to at most n.
    pub fn truncate(&self, n: i64) -> Self {
        Self::new(self.low, self.c.clone(), Some(self.prec.map_or(n, |p| p.min(n))), &self.zero)
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: i64) -> Self {
        Series { low: self.low + k, c: self.c.clone(), prec: self.prec.map(|p| p + k), zero: self.zero.clone() }
    }

    pub fn scale(&self, a: &R) -> Self {
        Self::new(self.low, self.c.iter().map(|x| x.clone() * a.clone()).collect(), self.prec, &self.zero)
    }

    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> Series<S> {
        Series::new(self.low, self.c.iter().map(f).collect(), self.prec, zero)
    }

    pub fn try_map<S: Ring, E>(&self, zero: &S, f: impl Fn(&R) -> std::result::Result<S, E>) -> std::result::Result<Series<S>, E> {
        let c = self.c.iter().map(f).collect::<std::result::Result<Vec<_>, E>>()?;
        Ok(Series::new(self.low, c, self.prec, zero))
    }

    /// Agreement on all coefficients below x^n.
    pub fn eq_to(&self, other: &Self, n: i64) -> bool {
        let lo = self.low.min(other.low);
        (lo..n).all(|k| self.coeff_unchecked(k) == other.coeff_unchecked(k))
    }

    /// Exponent of the first coefficient where the two series differ,
    /// capped at the joint precision (or `cap` for exact series).
    pub fn agreement(&self, other: &Self, cap: i64) -> i64 {
        let d = self.clone() - other.clone();
        let p = d.prec.unwrap_or(cap).min(cap);
        d.valuation().map_or(p, |v| v.min(p))
    }

    /// Inverse for a series with a unit lowest coefficient.
    pub fn invert(&self) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| Error::Precision("inverting an indeterminate series".into()))?;
        let c0inv = self.c[0].inv().ok_or_else(|| Error::NotUnit("lowest series coefficient".into()))?;
        let prec = match self.prec {
            Some(p) => p,
            None if self.c.len() == 1 => return Ok(Self::monomial(c0inv, -v)),
            None => return Err(Error::Precision("exact series with several terms has no finite inverse".into())),
        };
        let r = (prec - v) as usize;
        let mut b: Vec<R> = Vec::with_capacity(r);
        for k in 0..r {
            if k == 0 {
                b.push(c0inv.clone());
                continue;
            }
            let mut acc = self.zero.clone();
            for i in 1..=k.min(self.c.len() - 1) {
                acc = acc + self.c[i].clone() * b[k - i].clone();
            }
            b.push(-(acc * c0inv.clone()));
        }
        Ok(Self::new(-v, b, Some(-v + r as i64), &self.zero))
    }

    /// Inverse after truncating an exact series to absolute precision n.
    pub fn invert_to(&self, n: i64) -> Result<Self> {
        if self.is_exact() && self.c.len() > 1 {
            self.truncate(n).invert()
        } else {
            self.invert()
        }
    }

    /// Substitution x -> t for t of valuation exactly 1.
    pub fn subst(&self, t: &Self) -> Result<Self> {
        if t.valuation() != Some(1) {
            return Err(Error::Precondition("substituted series must have valuation 1".into()));
        }
        let mut acc = Series::new(0, vec![], self.prec, &self.zero);
        if self.c.is_empty() {
            return Ok(acc);
        }
        let one = Series::scalar(self.zero.one_like());
        let tinv = if self.low < 0 { Some(t.invert()?) } else { None };
        let base = if self.low < 0 { tinv.clone().unwrap() } else { t.clone() };
        let mut pw = one.clone();
        for _ in 0..self.low.unsigned_abs() {
            pw = pw * base.clone();
        }
        for c in &self.c {
            if !c.is_zero() {
                acc = acc + pw.scale(c);
            }
            pw = pw * t.clone();
        }
        Ok(acc)
    }
}

impl<R: Ring> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.c == other.c && (self.c.is_empty() || self.low == other.low)
    }
}

impl<R: Ring> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}*x^{}", c, k)?;
        }
        if first && self.prec.is_none() {
            write!(f, "0")?;
        }
        if let Some(p) = self.prec {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(x^{})", p)?;
        }
        Ok(())
    }
}

impl<R: Ring> Add for Series<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if rhs.c.is_empty() && rhs.prec.is_none() {
            return self;
        }
        if self.c.is_empty() && self.prec.is_none() {
            return rhs;
        }
        let prec = min_prec(self.prec, rhs.prec);
        let lo = match (self.c.is_empty(), rhs.c.is_empty()) {
            (true, true) => return Series::big_o(prec.unwrap(), &self.zero),
            (true, false) => rhs.low,
            (false, true) => self.low,
            (false, false) => self.low.min(rhs.low),
        };
        let mut hi = self.top().max(rhs.top());
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        if hi <= lo {
            return Series::new(lo, vec![], prec, &self.zero);
        }
        let mut v = vec![self.zero.clone(); (hi - lo) as usize];
        for (k, c) in self.c.into_iter().enumerate() {
            let e = self.low + k as i64;
            if e < hi {
                v[(e - lo) as usize] = c;
            }
        }
        for (k, c) in rhs.c.into_iter().enumerate() {
            let e = rhs.low + k as i64;
            if e < hi {
                let slot = &mut v[(e - lo) as usize];
                *slot = slot.clone() + c;
            }
        }
        Series::new(lo, v, prec, &self.zero)
    }
}

impl<R: Ring> Neg for Series<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Series { low: self.low, c: self.c.into_iter().map(|x| -x).collect(), prec: self.prec, zero: self.zero }
    }
}

impl<R: Ring> Sub for Series<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<R: Ring> Mul for Series<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let exact_zero = |s: &Series<R>| s.c.is_empty() && s.prec.is_none();
        if exact_zero(&self) || exact_zero(&rhs) {
            return Series::new(0, vec![], None, &self.zero);
        }
        let va = self.valuation_bound().unwrap();
        let vb = rhs.valuation_bound().unwrap();
        let prec = min_prec(self.prec.map(|p| p + vb), rhs.prec.map(|p| p + va));
        if self.c.is_empty() || rhs.c.is_empty() {
            return Series::big_o(prec.unwrap(), &self.zero);
        }
        let lo = self.low + rhs.low;
        let mut len = self.c.len() + rhs.c.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - lo).max(0) as usize);
        }
        let mut v = vec![self.zero.clone(); len];
        for (i, a) in self.c.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    v[i + j] = v[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Series::new(lo, v, prec, &self.zero)
    }
}

impl<R: Ring> Ring for Series<R> {
    fn zero_like(&self) -> Self {
        Series::new(0, vec![], None, &self.zero)
    }
    fn one_like(&self) -> Self {
        Series::scalar(self.zero.one_like())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn is_exact_zero(&self) -> bool {
        self.c.is_empty() && self.prec.is_none()
    }
    fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }
    fn inv(&self) -> Option<Self> {
        self.invert().ok()
    }
    fn from_base(&self, c: &Gf) -> Self {
        Series::scalar(self.zero.from_base(c))
    }
    /// c_k x^k -> c_k^q x^{qk}; precision scales by q.
    fn frob(&self, q: u64) -> Self {
        if self.c.is_empty() {
            return Series { low: 0, c: vec![], prec: self.prec.map(|p| p * q as i64), zero: self.zero.clone() };
        }
        let qi = q as usize;
        let mut v = vec![self.zero.clone(); (self.c.len() - 1) * qi + 1];
        for (k, c) in self.c.iter().enumerate() {
            v[k * qi] = c.frob(q);
        }
        Series::new(self.low * q as i64, v, self.prec.map(|p| p * q as i64), &self.zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::{FieldTower, Gf};

    fn f3() -> std::sync::Arc<crate::algebra::gf::GfCtx> {
        FieldTower::new(3, 1, 1).unwrap().base
    }

    fn g(k: &std::sync::Arc<crate::algebra::gf::GfCtx>, v: i64) -> Gf {
        Gf::from_int(k, v)
    }

    #[test]
    fn geometric_inverse() {
        let k = f3();
        let s = Series::power(vec![g(&k, 1), g(&k, 0), g(&k, -1)], 6, &g(&k, 0));
        let t = s.invert().unwrap();
        let expect = Series::power(vec![g(&k, 1), g(&k, 0), g(&k, 1), g(&k, 0), g(&k, 1)], 6, &g(&k, 0));
        assert_eq!(t, expect);
        let one = s * t;
        assert_eq!(one.prec(), Some(6));
        assert!(one.eq_to(&Series::scalar(g(&k, 1)), 6));
    }

    #[test]
    fn laurent_inverse() {
        let k = f3();
        // x(1+x) to precision 8
        let s = Series::new(1, vec![g(&k, 1), g(&k, 1)], Some(8), &g(&k, 0));
        let t = s.invert().unwrap();
        assert_eq!(t.valuation(), Some(-1));
        // 1/(1+x) = 1 - x + x^2 - ... ; -1 = 2 in F_3
        assert_eq!(t.coeff(-1), g(&k, 1));
        assert_eq!(t.coeff(0), g(&k, 2));
        assert_eq!(t.coeff(1), g(&k, 1));
        let one = s * t;
        assert!(one.eq_to(&Series::scalar(g(&k, 1)), one.prec().unwrap()));
        assert_eq!(one.prec(), Some(7));
    }

    #[test]
    fn identity_inverse() {
        let k = f3();
        let one = Series::scalar(g(&k, 1));
        assert_eq!(one.invert().unwrap(), one);
    }

    #[test]
    fn product_precision() {
        let k = f3();
        let a = Series::new(-1, vec![g(&k, 1)], Some(4), &g(&k, 0));
        let b = Series::new(2, vec![g(&k, 1), g(&k, 1)], Some(5), &g(&k, 0));
        assert_eq!((a * b).prec(), Some(4));
    }

    #[test]
    fn frob_matches_pow() {
        let k = FieldTower::new(3, 1, 2).unwrap().ext;
        let i = Gf::generator(&k);
        let s = Series::new(-1, vec![i.clone(), Gf::one(&k), i], Some(5), &Gf::zero(&k));
        let a = s.frob(3);
        let b = s.pow(3);
        assert!(a.eq_to(&b, a.prec().unwrap().min(b.prec().unwrap())));
        assert_eq!(a.prec(), Some(15));
    }

    #[test]
    fn subst_linear() {
        let k = f3();
        // (1 + x)(x -> 2x) = 1 + 2x
        let s = Series::exact(0, vec![g(&k, 1), g(&k, 1)], &g(&k, 0));
        let t = Series::monomial(g(&k, 2), 1);
        assert_eq!(s.subst(&t).unwrap(), Series::exact(0, vec![g(&k, 1), g(&k, 2)], &g(&k, 0)));
    }
}
