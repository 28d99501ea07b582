//! The rational function field F_q(T).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gf::Gf;
use super::poly::Poly;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Reduced fraction num/den with monic denominator.
#[derive(Clone)]
pub struct RatFunc {
    num: Poly<Gf>,
    den: Poly<Gf>,
}

impl RatFunc {
    pub fn new(num: Poly<Gf>, den: Poly<Gf>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotUnit("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly<Gf>, den: Poly<Gf>) -> Self {
        if num.is_zero() {
            let one = den.one_like();
            return RatFunc { num, den: one };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let l = d.lead().unwrap().clone();
        if !l.is_one() {
            let li = l.inv().unwrap();
            n = n.scale(&li);
            d = d.scale(&li);
        }
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: Poly<Gf>) -> Self {
        let den = p.one_like();
        RatFunc { num: p, den }
    }

    pub fn num(&self) -> &Poly<Gf> {
        &self.num
    }
    pub fn den(&self) -> &Poly<Gf> {
        &self.den
    }

    /// The variable T over the field of `c`.
    pub fn t(c: &Gf) -> Self {
        Self::from_poly(Poly::x(c))
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Valuation at the irreducible (monic) polynomial `p`.
    pub fn valuation_at(&self, p: &Poly<Gf>) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let count = |x: &Poly<Gf>| {
            let mut x = x.clone();
            let mut k = 0i64;
            loop {
                let (q, r) = x.divrem(p).unwrap();
                if !r.is_zero() {
                    return k;
                }
                x = q;
                k += 1;
            }
        };
        Some(count(&self.num) - count(&self.den))
    }

    /// Writes self = n / f^k with n a polynomial, when the denominator
    /// divides a power of f. Returns the least such k.
    pub fn as_af(&self, f: &Poly<Gf>) -> Option<(Poly<Gf>, u32)> {
        let dd = self.den.degree().unwrap();
        let mut fk = f.one_like();
        // multiplicities in den are at most deg den
        for k in 0..=dd as u32 {
            let (q, r) = fk.divrem(&self.den).unwrap();
            if r.is_zero() {
                return Some((self.num.clone() * q, k));
            }
            fk = fk * f.clone();
        }
        None
    }

    /// Inverse of [`RatFunc::as_af`].
    pub fn from_af(num: Poly<Gf>, f: &Poly<Gf>, k: u32) -> Self {
        Self::reduce(num, f.pow(k as u64))
    }

    /// Substitution T -> c in the base field; `None` at a pole.
    pub fn eval_at(&self, c: &Gf) -> Option<Gf> {
        let d = self.den.eval(c);
        let di = d.inv()?;
        Some(self.num.eval(c) * di)
    }

    /// Evaluation at an element of an F_q-algebra (which must invert the
    /// denominator's value).
    pub fn eval_in<S: Ring>(&self, x: &S) -> Option<S> {
        let n = self.num.eval_with(x, |c| x.from_base(c));
        let d = self.den.eval_with(x, |c| x.from_base(c));
        d.inv().map(|di| n * di)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}
impl Eq for RatFunc {}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "[{:?}]/[{:?}]", self.num, self.den)
        }
    }
}

impl Add for RatFunc {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return Self::reduce(self.num + rhs.num, self.den);
        }
        Self::reduce(self.num * rhs.den.clone() + rhs.num * self.den.clone(), self.den * rhs.den)
    }
}
impl Neg for RatFunc {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: -self.num, den: self.den }
    }
}
impl Sub for RatFunc {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}
impl Mul for RatFunc {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_poly() && rhs.is_poly() {
            let c = self.den.lead().unwrap().clone() * rhs.den.lead().unwrap().clone();
            let den = Poly::constant(c.one_like());
            return RatFunc { num: self.num * rhs.num, den };
        }
        Self::reduce(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Ring for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc { num: self.num.zero_like(), den: self.den.one_like() }
    }
    fn one_like(&self) -> Self {
        RatFunc { num: self.num.one_like(), den: self.den.one_like() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::reduce(self.den.clone(), self.num.clone()))
    }
    fn from_base(&self, c: &Gf) -> Self {
        Self::from_poly(self.num.from_base(c))
    }
    /// T -> T^q; coefficients in F_q are fixed by the q-power map.
    fn frob(&self, q: u64) -> Self {
        RatFunc { num: self.num.frob(q), den: self.den.frob(q) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::FieldTower;

    #[test]
    fn field_ops() {
        let k = FieldTower::new(3, 1, 1).unwrap().base;
        let t = RatFunc::t(&Gf::zero(&k));
        let one = t.one_like();
        let a = (t.clone() + one.clone()) * (t.clone() - one.clone()).inv().unwrap();
        let b = a.inv().unwrap();
        assert!((a.clone() * b).is_one());
        assert_eq!(a.frob(3), a.pow(3));
        let f = Poly::x(&Gf::zero(&k));
        let x = t.inv().unwrap().pow(3) * (t.clone() + one);
        let (n, e) = x.as_af(&f).unwrap();
        assert_eq!(e, 3);
        assert_eq!(RatFunc::from_af(n, &f, e), x);
    }
}
