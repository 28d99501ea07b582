//! Validated job parameters.

use std::sync::Arc;

use crate::algebra::gf::{checked_max_field_size, is_prime};
use crate::algebra::{Gf, GfCtx, Poly};
use crate::error::{Error, Result};

/// q = p^e, f little-endian over F_q, precision N and τ-degree D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub p: u64,
    pub e: u32,
    pub f: Vec<u32>,
    pub n: i64,
    pub d: usize,
    /// Field size bound in force (3^10 unless `DFORGE_MAX_Q` says otherwise).
    pub bound: u64,
}

/// Splits q into p^e.
pub fn split_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::Config(format!("q = {q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let (mut r, mut e) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 || !is_prime(p) {
        return Err(Error::Config(format!("q = {q} is not a prime power")));
    }
    Ok((p, e))
}

/// Parses "0,1" style little-endian coefficient lists. f must be monic of
/// degree at least 1 with every index below q.
pub fn parse_f(s: &str, q: u64) -> Result<Vec<u32>> {
    let bad = |m: String| Error::Config(format!("malformed f {s:?}: {m}"));
    let idx = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| bad(format!("{t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if let Some(&i) = idx.iter().find(|&&i| i as u64 >= q) {
        return Err(bad(format!("index {i} is not an element of F_{q}")));
    }
    if idx.len() < 2 {
        return Err(bad("f must have degree at least 1".into()));
    }
    if *idx.last().unwrap() != 1 {
        return Err(bad("f must be monic (leading index 1)".into()));
    }
    Ok(idx)
}

impl JobConfig {
    pub fn new(q: u64, f: &str, n: i64, d: usize) -> Result<Self> {
        let bound = checked_max_field_size()?;
        let (p, e) = split_prime_power(q)?;
        if q > bound {
            return Err(Error::SizeBound { size: q, bound });
        }
        let f = parse_f(f, q)?;
        if n < 1 {
            return Err(Error::Precision(format!("N = {n} must be positive")));
        }
        Ok(JobConfig { p, e, f, n, d, bound })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn field(&self) -> Result<Arc<GfCtx>> {
        GfCtx::new(self.p, self.e, self.bound)
    }

    pub fn f_poly(&self) -> Result<Poly<Gf>> {
        Ok(Poly::from_indices(&self.field()?, &self.f))
    }

    pub fn deg_f(&self) -> usize {
        self.f.len() - 1
    }
}
