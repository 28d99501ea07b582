//! Twisted polynomials K{τ} with τ b = b^q τ, and kernels of the
//! associated additive polynomials over finite fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::gf::Gf;
use crate::algebra::ring::Ring;
use crate::error::{Error, Result};

/// Σ a_i τ^i with twist q.
#[derive(Clone)]
pub struct SkewPoly<R: Ring> {
    c: Vec<R>,
    q: u64,
    zero: R,
}

impl<R: Ring> SkewPoly<R> {
    pub fn new(mut c: Vec<R>, q: u64, zero: &R) -> Self {
        while c.last().map_or(false, |x| x.is_exact_zero()) {
            c.pop();
        }
        SkewPoly { c, q, zero: zero.zero_like() }
    }

    pub fn from_coeffs(c: Vec<R>, q: u64) -> Self {
        let z = c.first().expect("nonempty coefficient list").zero_like();
        Self::new(c, q, &z)
    }

    pub fn constant(a: R, q: u64) -> Self {
        let z = a.zero_like();
        Self::new(vec![a], q, &z)
    }

    pub fn zero(template: &R, q: u64) -> Self {
        Self::new(vec![], q, template)
    }

    pub fn one(template: &R, q: u64) -> Self {
        Self::constant(template.one_like(), q)
    }

    /// a τ^n.
    pub fn monomial(a: R, n: usize, q: u64) -> Self {
        let z = a.zero_like();
        let mut c = vec![z.clone(); n];
        c.push(a);
        Self::new(c, q, &z)
    }

    /// τ itself.
    pub fn tau(template: &R, q: u64) -> Self {
        Self::monomial(template.one_like(), 1, q)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> R {
        self.c.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn zero_coeff(&self) -> &R {
        &self.zero
    }

    /// τ-degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&R> {
        self.c.last()
    }

    /// ∂₀, the constant coefficient.
    pub fn d0(&self) -> R {
        self.coeff(0)
    }

    /// No known nonzero coefficient.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.q, o.q, "skew polynomials with different twists");
    }

    /// Checked product (errors on twist mismatch instead of panicking).
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.q != o.q {
            return Err(Error::DomainMismatch(format!("twist {} vs {}", self.q, o.q)));
        }
        Ok(self.mul_trunc(o, usize::MAX))
    }

    /// Product with all terms of τ-degree > max_deg dropped.
    pub fn mul_trunc(&self, o: &Self, max_deg: usize) -> Self {
        self.check(o);
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero(&self.zero, self.q);
        }
        let len = (self.c.len() + o.c.len() - 1).min(max_deg.saturating_add(1));
        let mut out = vec![self.zero.clone(); len];
        // b^{q^i} for each coefficient of o, built incrementally in i
        let mut twisted: Vec<R> = o.c.clone();
        for (i, a) in self.c.iter().enumerate() {
            if i >= len {
                break;
            }
            if i > 0 {
                let lim = (len - i).min(twisted.len());
                for b in twisted.iter_mut().take(lim) {
                    *b = b.frob(self.q);
                }
                twisted.truncate(lim);
            }
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in twisted.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_exact_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Self::new(out, self.q, &self.zero)
    }

    /// Truncation to τ-degree at most d.
    pub fn truncate(&self, d: usize) -> Self {
        let mut c = self.c.clone();
        c.truncate(d + 1);
        Self::new(c, self.q, &self.zero)
    }

    /// Left scalar multiplication c·a.
    pub fn scale_left(&self, s: &R) -> Self {
        Self::new(self.c.iter().map(|a| s.clone() * a.clone()).collect(), self.q, &self.zero)
    }

    /// Applies a map to every coefficient.
    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> SkewPoly<S> {
        SkewPoly::new(self.c.iter().map(f).collect(), self.q, zero)
    }

    /// Right division: a = quot·b + rem with deg rem < deg b.
    pub fn right_divmod(&self, b: &Self) -> Result<(Self, Self)> {
        self.check(b);
        let db = b.degree().ok_or(Error::ZeroPolynomial("right division"))?;
        let lb = b.lead().unwrap().clone();
        let mut r = self.clone();
        let mut quot = vec![self.zero.clone(); self.c.len().saturating_sub(db)];
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let k = dr - db;
            let lbk = lb.frob_n(self.q, k as u32);
            let inv = lbk.inv().ok_or_else(|| Error::NotUnit("leading coefficient of divisor".into()))?;
            let t = r.lead().unwrap().clone() * inv;
            let term = Self::monomial(t.clone(), k, self.q);
            let sub = term.mul_trunc(b, usize::MAX);
            let mut nc = (r - sub).c;
            // the top coefficient cancels exactly; drop it even if a
            // precision-limited ring leaves an indeterminate zero there
            nc.truncate(dr);
            r = Self::new(nc, self.q, &self.zero);
            quot[k] = quot[k].clone() + t;
        }
        Ok((Self::new(quot, self.q, &self.zero), r))
    }

    /// Evaluates Σ a_i y^{q^i} for y in the coefficient ring.
    pub fn eval(&self, y: &R) -> R {
        self.eval_in(y, |a| a.clone())
    }

    /// Evaluates at y in an algebra S over the coefficient ring.
    pub fn eval_in<S: Ring>(&self, y: &S, embed: impl Fn(&R) -> S) -> S {
        let mut acc = y.zero_like();
        let mut yi = y.clone();
        for (i, a) in self.c.iter().enumerate() {
            if i > 0 {
                yi = yi.frob(self.q);
            }
            if !a.is_exact_zero() {
                acc = acc + embed(a) * yi.clone();
            }
        }
        acc
    }

    /// ξ·a·ξ^{-1}: coefficient i becomes ξ a_i ξ^{-q^i}.
    pub fn conjugate(&self, xi: &R) -> Result<Self> {
        let xinv = xi.inv().ok_or_else(|| Error::NotUnit("conjugating element".into()))?;
        let mut c = Vec::with_capacity(self.c.len());
        let mut xp = xinv;
        for (i, a) in self.c.iter().enumerate() {
            if i > 0 {
                xp = xp.frob(self.q);
            }
            c.push(xi.clone() * a.clone() * xp.clone());
        }
        Ok(Self::new(c, self.q, &self.zero))
    }
}

/// Compositional inverse of s = 1 + s_1 τ + ... up to τ-degree d:
/// t_0 = 1 and t_n = -Σ_{i=1..n} s_i t_{n-i}^{q^i}.
pub fn tau_series_invert<R: Ring>(s: &SkewPoly<R>, d: usize) -> Result<SkewPoly<R>> {
    if !s.d0().is_one() {
        return Err(Error::Precondition("τ-series must have constant term 1".into()));
    }
    let q = s.q;
    let mut t: Vec<R> = vec![s.zero.one_like()];
    for n in 1..=d {
        let mut acc = s.zero.clone();
        for i in 1..=n {
            let si = s.coeff(i);
            if si.is_exact_zero() {
                continue;
            }
            acc = acc + si * t[n - i].frob_n(q, i as u32);
        }
        t.push(-acc);
    }
    Ok(SkewPoly::new(t, q, &s.zero))
}

impl<R: Ring> PartialEq for SkewPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.c == other.c
    }
}

impl<R: Ring> fmt::Debug for SkewPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})t^{}", a, i)?;
        }
        Ok(())
    }
}

impl<R: Ring> Add for SkewPoly<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        let (mut long, short) = if self.c.len() >= rhs.c.len() { (self, rhs) } else { (rhs, self) };
        for (i, b) in short.c.into_iter().enumerate() {
            long.c[i] = long.c[i].clone() + b;
        }
        Self::new(long.c, long.q, &long.zero)
    }
}

impl<R: Ring> Neg for SkewPoly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        SkewPoly { c: self.c.into_iter().map(|a| -a).collect(), q: self.q, zero: self.zero }
    }
}

impl<R: Ring> Sub for SkewPoly<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<R: Ring> Mul for SkewPoly<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_trunc(&rhs, usize::MAX)
    }
}

/// Row-reduces a matrix over F_p in place and returns a nullspace basis of
/// the map x -> M x (M given as rows).
pub fn nullspace_mod_p(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let inv = |a: u32| -> u32 {
        let mut r = 1u64;
        let (mut b, mut e) = (a as u64, (p - 2) as u64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, pr);
        let iv = inv(m[row][col]);
        for x in m[row].iter_mut() {
            *x = *x * iv % p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..ncols {
                    m[r][c] = (m[r][c] + (p - f) * m[row][c]) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; ncols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][fc]) % p;
            }
            v
        })
        .collect()
}

fn digits(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

/// All y in the coefficient field F_{q^m} with a(y) = 0, sorted by encoding.
/// The map y -> a(y) is F_p-linear, so the kernel is the nullspace of its
/// matrix in the power basis over F_p.
pub fn skew_kernel(a: &SkewPoly<Gf>) -> Result<Vec<Gf>> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial("finite kernel"));
    }
    let ctx = a.zero.ctx().clone();
    let p = ctx.p() as u32;
    let n = ctx.degree();
    // column j is the image of the basis element p^j
    let mut cols = Vec::with_capacity(n as usize);
    for j in 0..n {
        let e = Gf::from_index(&ctx, p.pow(j));
        cols.push(digits(a.eval(&e).index(), p, n));
    }
    let rows: Vec<Vec<u32>> = (0..n as usize).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let basis = nullspace_mod_p(&rows, n as usize, p);
    let k = basis.len() as u32;
    let mut out = Vec::with_capacity(p.pow(k) as usize);
    for combo in 0..p.pow(k) {
        let cd = digits(combo, p, k);
        let mut v = vec![0u32; n as usize];
        for (b, &c) in basis.iter().zip(&cd) {
            for i in 0..n as usize {
                v[i] = (v[i] + c * b[i]) % p;
            }
        }
        let idx = v.iter().rev().fold(0, |acc, &d| acc * p + d);
        out.push(Gf::from_index(&ctx, idx));
    }
    out.sort();
    Ok(out)
}

/// Kernel by exhaustive evaluation (reference implementation).
pub fn skew_kernel_brute(a: &SkewPoly<Gf>) -> Vec<Gf> {
    let ctx = a.zero.ctx().clone();
    Gf::elements(&ctx).filter(|y| a.eval(y).is_zero()).collect()
}
