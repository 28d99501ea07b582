//! Finite fields F_{p^n} with table-driven multiplication.
//!
//! An element is stored as the integer whose base-p digits are its
//! coordinates in the power basis 1, x, ..., x^{n-1} of F_p[x]/(modulus).
//! This integer is also the element's position in the fixed enumeration
//! used by the serialization formats.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::ring::Ring;
use crate::error::{Error, Result};

/// Default size bound on constructed fields (3^10).
pub const DEFAULT_MAX_FIELD_SIZE: u64 = 59_049;

/// Environment variable overriding [`DEFAULT_MAX_FIELD_SIZE`].
pub const MAX_Q_ENV: &str = "DFORGE_MAX_Q";

/// Field size bound, honouring the `DFORGE_MAX_Q` override.
/// Unparsable overrides fall back to the default; use
/// [`checked_max_field_size`] to reject them instead.
pub fn max_field_size() -> u64 {
    checked_max_field_size().unwrap_or(DEFAULT_MAX_FIELD_SIZE)
}

/// Like [`max_field_size`] but a malformed override is a config error.
pub fn checked_max_field_size() -> Result<u64> {
    match std::env::var(MAX_Q_ENV) {
        Err(_) => Ok(DEFAULT_MAX_FIELD_SIZE),
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) if v >= 2 => Ok(v),
            _ => Err(Error::Config(format!("{MAX_Q_ENV}={s:?} is not an integer >= 2"))),
        },
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic tables and metadata of a finite field.
pub struct GfCtx {
    p: u32,
    n: u32,
    size: u32,
    /// Monic modulus over F_p, little-endian, length n + 1.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Subfield F_q this field is viewed over, with its embedding table.
    base: Option<(Arc<GfCtx>, Vec<u32>)>,
}

impl fmt::Debug for GfCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[{:?}]", self.p, self.n, self.modulus)
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..n {
            prod[k - n + i] = (prod[k - n + i] + (p - c) * modulus[i] % p) % p;
        }
        prod[k] = 0;
    }
    prod.truncate(n);
    prod
}

fn digits(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(n as usize);
    for _ in 0..n {
        d.push(v % p);
        v /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Irreducibility over F_p by trial division with all monic polynomials of
/// degree at most n/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low as u32, p, d as u32);
            g.push(1);
            if poly_rem_zero(modulus, &g, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_zero(a: &[u32], g: &[u32], p: u32) -> bool {
    let mut r = a.to_vec();
    let dg = g.len() - 1;
    for k in (dg..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        for i in 0..=dg {
            r[k - dg + i] = (r[k - dg + i] + (p - c) * g[i] % p) % p;
        }
    }
    r[..dg].iter().all(|&x| x == 0)
}

impl GfCtx {
    /// F_{p^n} with the least monic irreducible modulus (ordered by the
    /// integer encoding of its lower coefficients).
    pub fn new(p: u64, n: u32, max_size: u64) -> Result<Arc<Self>> {
        Self::check_size(p, n, max_size)?;
        let p32 = p as u32;
        let count = (p as u64).pow(n);
        for low in 0..count {
            let mut m = digits(low as u32, p32, n);
            m.push(1);
            if is_irreducible(&m, p32) {
                return Ok(Arc::new(Self::build(p32, m)));
            }
        }
        Err(Error::Internal(format!("no irreducible polynomial of degree {n} over F_{p}")))
    }

    /// F_p[x]/(modulus) for a caller-supplied monic modulus (little-endian).
    pub fn with_modulus(p: u64, modulus: &[u32], max_size: u64) -> Result<Arc<Self>> {
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::Config("modulus must be monic of degree >= 1".into()));
        }
        let n = (modulus.len() - 1) as u32;
        Self::check_size(p, n, max_size)?;
        let p32 = p as u32;
        if modulus.iter().any(|&c| c >= p32) {
            return Err(Error::Config("modulus coefficient out of range".into()));
        }
        if !is_irreducible(modulus, p32) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Arc::new(Self::build(p32, modulus.to_vec())))
    }

    fn check_size(p: u64, n: u32, max_size: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::Config("extension degree must be >= 1".into()));
        }
        let size = (p as u128).pow(n);
        if size > max_size as u128 {
            return Err(Error::SizeBound { size: size.min(u64::MAX as u128) as u64, bound: max_size });
        }
        Ok(())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Self {
        let n = (modulus.len() - 1) as u32;
        let size = p.pow(n);
        let order = size - 1;
        // smallest primitive element
        let mut exp = Vec::new();
        for g in 1..size {
            let gd = digits(g, p, n);
            let mut table = Vec::with_capacity(order as usize);
            let mut cur = digits(1, p, n);
            let mut ok = true;
            for k in 0..order {
                let v = undigits(&cur, p);
                if k > 0 && v == 1 {
                    ok = false;
                    break;
                }
                table.push(v);
                cur = poly_mulmod(&cur, &gd, &modulus, p);
            }
            if ok {
                exp = table;
                break;
            }
        }
        let mut log = vec![0u32; size as usize];
        for (k, &v) in exp.iter().enumerate() {
            log[v as usize] = k as u32;
        }
        GfCtx { p, n, size, modulus, exp, log, base: None }
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }
    pub fn degree(&self) -> u32 {
        self.n
    }
    pub fn size(&self) -> u64 {
        self.size as u64
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// Size q of the base field this field is viewed over (itself if none).
    pub fn base_size(&self) -> u64 {
        self.base.as_ref().map(|(b, _)| b.size()).unwrap_or(self.size())
    }
    pub fn base(&self) -> Option<&Arc<GfCtx>> {
        self.base.as_ref().map(|(b, _)| b)
    }

    fn same_field(&self, other: &GfCtx) -> bool {
        std::ptr::eq(self, other) || (self.p == other.p && self.modulus == other.modulus)
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut r, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            let d = (a % self.p + b % self.p) % self.p;
            r += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        r
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut r, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            let d = (self.p - a % self.p) % self.p;
            r += d * place;
            place *= self.p;
            a /= self.p;
        }
        r
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.size - 1;
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % order as u64;
        self.exp[k as usize]
    }

    fn pow_raw(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        let k = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[k as usize]
    }
}

/// Element of a finite field.
#[derive(Clone)]
pub struct Gf {
    ctx: Arc<GfCtx>,
    v: u32,
}

impl Gf {
    pub fn new(ctx: &Arc<GfCtx>, v: u64) -> Result<Self> {
        if v >= ctx.size() {
            return Err(Error::Config(format!("field element index {v} out of range")));
        }
        Ok(Gf { ctx: ctx.clone(), v: v as u32 })
    }

    pub fn from_index(ctx: &Arc<GfCtx>, v: u32) -> Self {
        assert!(v < ctx.size, "field element index out of range");
        Gf { ctx: ctx.clone(), v }
    }

    pub fn zero(ctx: &Arc<GfCtx>) -> Self {
        Gf { ctx: ctx.clone(), v: 0 }
    }
    pub fn one(ctx: &Arc<GfCtx>) -> Self {
        Gf { ctx: ctx.clone(), v: 1 }
    }
    /// The class of the integer `n` in the prime field.
    pub fn from_int(ctx: &Arc<GfCtx>, n: i64) -> Self {
        let p = ctx.p as i64;
        Gf { ctx: ctx.clone(), v: n.rem_euclid(p) as u32 }
    }
    /// The power-basis generator x (for n >= 2) or 1 for prime fields.
    pub fn generator(ctx: &Arc<GfCtx>) -> Self {
        let v = if ctx.n >= 2 { ctx.p } else { 1 };
        Gf { ctx: ctx.clone(), v }
    }

    pub fn index(&self) -> u32 {
        self.v
    }
    pub fn ctx(&self) -> &Arc<GfCtx> {
        &self.ctx
    }

    /// All elements in enumeration order.
    pub fn elements(ctx: &Arc<GfCtx>) -> impl Iterator<Item = Gf> + '_ {
        (0..ctx.size).map(move |v| Gf { ctx: ctx.clone(), v })
    }

    /// Whether the element lies in the base subfield F_q.
    pub fn in_base(&self) -> bool {
        let q = self.ctx.base_size();
        self.pow(q) == *self
    }

    /// Preimage in the base field, if the element lies there.
    pub fn to_base(&self) -> Option<Gf> {
        match &self.ctx.base {
            None => Some(self.clone()),
            Some((b, table)) => table
                .iter()
                .position(|&x| x == self.v)
                .map(|i| Gf { ctx: b.clone(), v: i as u32 }),
        }
    }

    fn check(&self, other: &Gf) {
        assert!(self.ctx.same_field(&other.ctx), "mixed finite fields {:?} / {:?}", self.ctx, other.ctx);
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.ctx.same_field(&other.ctx)
    }
}
impl Eq for Gf {}

impl std::hash::Hash for Gf {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.v.hash(state);
    }
}

impl PartialOrd for Gf {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Gf {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.v.cmp(&other.v)
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}
impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Gf {
    type Output = Gf;
    fn add(self, rhs: Gf) -> Gf {
        self.check(&rhs);
        let v = self.ctx.add_raw(self.v, rhs.v);
        Gf { ctx: self.ctx, v }
    }
}
impl Sub for Gf {
    type Output = Gf;
    fn sub(self, rhs: Gf) -> Gf {
        self.check(&rhs);
        let v = self.ctx.add_raw(self.v, self.ctx.neg_raw(rhs.v));
        Gf { ctx: self.ctx, v }
    }
}
impl Mul for Gf {
    type Output = Gf;
    fn mul(self, rhs: Gf) -> Gf {
        self.check(&rhs);
        let v = self.ctx.mul_raw(self.v, rhs.v);
        Gf { ctx: self.ctx, v }
    }
}
impl Neg for Gf {
    type Output = Gf;
    fn neg(self) -> Gf {
        let v = self.ctx.neg_raw(self.v);
        Gf { ctx: self.ctx, v }
    }
}

impl Ring for Gf {
    fn zero_like(&self) -> Self {
        Gf { ctx: self.ctx.clone(), v: 0 }
    }
    fn one_like(&self) -> Self {
        Gf { ctx: self.ctx.clone(), v: 1 }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn is_one(&self) -> bool {
        self.v == 1
    }
    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            return None;
        }
        let order = self.ctx.size - 1;
        let k = (order - self.ctx.log[self.v as usize]) % order;
        Some(Gf { ctx: self.ctx.clone(), v: self.ctx.exp[k as usize] })
    }
    fn pow(&self, e: u64) -> Self {
        Gf { ctx: self.ctx.clone(), v: self.ctx.pow_raw(self.v, e) }
    }
    fn from_base(&self, c: &Gf) -> Self {
        if self.ctx.same_field(&c.ctx) {
            return Gf { ctx: self.ctx.clone(), v: c.v };
        }
        if let Some((b, table)) = &self.ctx.base {
            if b.same_field(&c.ctx) {
                return Gf { ctx: self.ctx.clone(), v: table[c.v as usize] };
            }
        }
        if c.ctx.n == 1 && c.ctx.p == self.ctx.p {
            return Gf { ctx: self.ctx.clone(), v: c.v };
        }
        panic!("no embedding of {:?} into {:?}", c.ctx, self.ctx)
    }
}

/// Embedding table of `small` into `big` sending the power-basis generator
/// of `small` to the least root of its modulus in `big`.
pub fn embedding(small: &Arc<GfCtx>, big: &Arc<GfCtx>) -> Option<Vec<u32>> {
    if small.p != big.p || big.n % small.n != 0 {
        return None;
    }
    if small.same_field(big) {
        return Some((0..small.size).collect());
    }
    let root = (0..big.size).find(|&r| {
        let mut acc = 0u32;
        for &c in small.modulus.iter().rev() {
            acc = big.add_raw(big.mul_raw(acc, r), c);
        }
        acc == 0
    })?;
    let mut powers = vec![1u32];
    for i in 1..small.n as usize {
        powers.push(big.mul_raw(powers[i - 1], root));
    }
    Some(
        (0..small.size)
            .map(|v| {
                digits(v, small.p, small.n)
                    .iter()
                    .zip(&powers)
                    .fold(0, |acc, (&d, &pw)| big.add_raw(acc, big.mul_raw(d, pw)))
            })
            .collect(),
    )
}

/// The tower F_q ⊂ F_{q^m} with q = p^e.
#[derive(Clone, Debug)]
pub struct FieldTower {
    pub base: Arc<GfCtx>,
    pub ext: Arc<GfCtx>,
    pub m: u32,
}

impl FieldTower {
    /// Builds F_q and F_{q^m} with the default size bound.
    pub fn new(p: u64, e: u32, m: u32) -> Result<Self> {
        Self::with_bound(p, e, m, max_field_size())
    }

    pub fn with_bound(p: u64, e: u32, m: u32, bound: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("extension degree m must be >= 1".into()));
        }
        let base = GfCtx::new(p, e, bound)?;
        Self::over(&base, m, bound)
    }

    /// Extension of degree m over an existing base field.
    pub fn over(base: &Arc<GfCtx>, m: u32, bound: u64) -> Result<Self> {
        if m == 1 {
            return Ok(FieldTower { base: base.clone(), ext: base.clone(), m });
        }
        let big = GfCtx::new(base.p(), base.n * m, bound)?;
        let table = embedding(base, &big).ok_or_else(|| Error::Internal("no subfield embedding".into()))?;
        let mut ctx = Arc::try_unwrap(big).expect("fresh context");
        ctx.base = Some((base.clone(), table));
        Ok(FieldTower { base: base.clone(), ext: Arc::new(ctx), m })
    }

    pub fn q(&self) -> u64 {
        self.base.size()
    }

    /// The q-Frobenius of F_{q^m}.
    pub fn frobenius(&self, x: &Gf) -> Gf {
        x.pow(self.q())
    }

    /// Embeds a base-field element into F_{q^m}.
    pub fn embed(&self, c: &Gf) -> Gf {
        Gf::zero(&self.ext).from_base(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(ctx: &Arc<GfCtx>) -> Vec<Gf> {
        Gf::elements(ctx).collect()
    }

    #[test]
    fn f9_frobenius_of_i() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let i = Gf::generator(&t.ext);
        assert_eq!(i.clone() * i.clone(), Gf::from_int(&t.ext, 2));
        // i^3 = 2i, checked against every element's cube
        let two_i = Gf::from_int(&t.ext, 2) * i.clone();
        assert_eq!(t.frobenius(&i), two_i);
        for x in all(&t.ext) {
            let cube = x.clone() * x.clone() * x.clone();
            assert_eq!(t.frobenius(&x), cube);
        }
    }

    #[test]
    fn f3_frobenius_is_identity() {
        let t = FieldTower::new(3, 1, 1).unwrap();
        for x in all(&t.ext) {
            assert_eq!(t.frobenius(&x), x);
        }
    }

    #[test]
    fn f4_non_subfield_elements_multiply_to_one() {
        let t = FieldTower::new(2, 2, 1).unwrap();
        let x = Gf::generator(&t.ext);
        let x1 = x.clone() + Gf::one(&t.ext);
        assert_eq!(x * x1, Gf::one(&t.ext));
    }

    #[test]
    fn multiplicative_group_order_small_fields() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 4), (5, 2), (7, 2)] {
            let ctx = GfCtx::new(p, n, DEFAULT_MAX_FIELD_SIZE).unwrap();
            let q = ctx.size();
            for x in all(&ctx).into_iter().skip(1) {
                assert!(x.pow(q - 1).is_one());
                assert_eq!(x.clone() * x.inv().unwrap(), x.one_like());
            }
        }
    }

    #[test]
    fn frobenius_power_m_is_identity() {
        let t = FieldTower::new(3, 1, 4).unwrap();
        for x in all(&t.ext) {
            let mut y = x.clone();
            for _ in 0..4 {
                y = t.frobenius(&y);
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let t = FieldTower::new(2, 2, 3).unwrap();
        for a in all(&t.base) {
            for b in all(&t.base) {
                assert_eq!(t.embed(&(a.clone() * b.clone())), t.embed(&a) * t.embed(&b));
                assert_eq!(t.embed(&(a.clone() + b.clone())), t.embed(&a) + t.embed(&b));
            }
            assert!(t.embed(&a).in_base());
            assert_eq!(t.embed(&a).to_base().unwrap(), a);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(GfCtx::with_modulus(3, &[1, 0, 1, 0, 1], 1000), Err(Error::ReducibleModulus(3))));
        assert!(matches!(FieldTower::with_bound(3, 1, 11, DEFAULT_MAX_FIELD_SIZE), Err(Error::SizeBound { .. })));
        assert!(GfCtx::new(4, 1, 100).is_err());
    }
}
