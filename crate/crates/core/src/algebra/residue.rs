//! The residue ring A/fA for A = F_q[T], with table arithmetic.
//!
//! Classes are indexed by 0..Q, where the index of c_0 + c_1 T + ... is
//! Σ idx(c_i) q^i. Index 0 is zero and index 1 is one.

use std::sync::Arc;

use super::gf::{Gf, GfCtx};
use super::poly::Poly;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Largest Q for which the ring builds full multiplication tables.
pub const MAX_TABLE_SIZE: u64 = 4096;

#[derive(Debug)]
pub struct ResidueRing {
    f: Poly<Gf>,
    field: Arc<GfCtx>,
    q: u32,
    n: u32,
    size: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<Option<u16>>,
}

impl ResidueRing {
    pub fn new(f: &Poly<Gf>) -> Result<Arc<Self>> {
        let n = match f.degree() {
            None => return Err(Error::Precondition("f must be nonzero".into())),
            Some(0) => return Err(Error::Precondition("f must not be a unit".into())),
            Some(n) => n as u32,
        };
        let field = f.zero_coeff().ctx().clone();
        let q = field.size() as u32;
        let size = (q as u64).pow(n);
        if size > MAX_TABLE_SIZE {
            return Err(Error::SizeBound { size, bound: MAX_TABLE_SIZE });
        }
        let size = size as u32;
        let f = f.monic()?;
        let mut r = ResidueRing {
            f,
            field,
            q,
            n,
            size,
            add: Vec::new(),
            mul: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
        };
        let polys: Vec<Poly<Gf>> = (0..size).map(|i| r.poly_of(i)).collect();
        let s = size as usize;
        r.add = vec![0; s * s];
        r.mul = vec![0; s * s];
        for a in 0..s {
            for b in a..s {
                let sum = r.index_of(&(polys[a].clone() + polys[b].clone()));
                let prod = r.index_of(&(polys[a].clone() * polys[b].clone()));
                r.add[a * s + b] = sum as u16;
                r.add[b * s + a] = sum as u16;
                r.mul[a * s + b] = prod as u16;
                r.mul[b * s + a] = prod as u16;
            }
        }
        r.neg = (0..s).map(|a| r.index_of(&(-polys[a].clone())) as u16).collect();
        r.inv = (0..s).map(|a| (0..s).find(|&b| r.mul[a * s + b] == 1).map(|b| b as u16)).collect();
        Ok(Arc::new(r))
    }

    pub fn f(&self) -> &Poly<Gf> {
        &self.f
    }
    pub fn field(&self) -> &Arc<GfCtx> {
        &self.field
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn deg(&self) -> u32 {
        self.n
    }
    /// Q = q^{deg f}.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Representative of degree < deg f.
    pub fn poly_of(&self, mut i: u32) -> Poly<Gf> {
        let mut c = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            c.push(Gf::from_index(&self.field, i % self.q));
            i /= self.q;
        }
        Poly::new(c, Gf::zero(&self.field))
    }

    /// Index of the class of an arbitrary polynomial.
    pub fn index_of(&self, p: &Poly<Gf>) -> u32 {
        let r = p.rem(&self.f).unwrap();
        r.coeffs().iter().rev().fold(0, |acc, c| acc * self.q + c.index())
    }

    /// Index of the class of a constant in F_q.
    pub fn const_index(&self, c: &Gf) -> u32 {
        c.index()
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.size + b) as usize] as u32
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.size + b) as usize] as u32
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        self.inv[a as usize].map(|x| x as u32)
    }
    #[inline]
    pub fn is_unit(&self, a: u32) -> bool {
        self.inv[a as usize].is_some()
    }
    /// Whether the class is a nonzero constant, i.e. lies in F_q*.
    #[inline]
    pub fn is_fq_star(&self, a: u32) -> bool {
        a != 0 && a < self.q
    }

    pub fn units(&self) -> Vec<u32> {
        (0..self.size).filter(|&a| self.is_unit(a)).collect()
    }
}

/// Unit classes of A/fA in enumeration order.
pub fn residue_units(f: &Poly<Gf>) -> Result<Vec<Poly<Gf>>> {
    let r = ResidueRing::new(f)?;
    Ok(r.units().into_iter().map(|i| r.poly_of(i)).collect())
}

/// The characteristic map γ: A -> K at a, i.e. a(θ).
pub fn char_eval<R: Ring>(a: &Poly<Gf>, theta: &R) -> R {
    a.eval_with(theta, |c| theta.from_base(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::FieldTower;

    fn a3(idx: &[u32]) -> Poly<Gf> {
        let k = FieldTower::new(3, 1, 1).unwrap().base;
        Poly::from_indices(&k, idx)
    }

    #[test]
    fn unit_counts() {
        let u = residue_units(&a3(&[0, 1])).unwrap();
        assert_eq!(u, vec![a3(&[1]), a3(&[2])]);
        let u = residue_units(&a3(&[0, 0, 1])).unwrap();
        assert_eq!(u.len(), 6);
        assert!(u.iter().all(|p| !p.coeff(0).is_zero()));
        // T^2 + 1 is irreducible over F_3, so A/fA = F_9 and there are 8 units
        assert_eq!(residue_units(&a3(&[1, 0, 1])).unwrap().len(), 8);
        assert!(residue_units(&a3(&[2])).is_err());
    }

    #[test]
    fn units_closed_and_partition() {
        for f in [a3(&[0, 1]), a3(&[0, 0, 1]), a3(&[2, 0, 1]), a3(&[1, 0, 1])] {
            let r = ResidueRing::new(&f).unwrap();
            let units = r.units();
            for &a in &units {
                for &b in &units {
                    assert!(r.is_unit(r.mul(a, b)));
                }
            }
            let nonunits = (0..r.size()).filter(|&a| !r.is_unit(a)).count();
            assert_eq!(units.len() + nonunits, r.size() as usize);
            // Q·∏(1 - q^{-deg p})
            let q = r.q() as f64;
            let mut expect = r.size() as f64;
            for (p, _) in f.factor_trial() {
                expect *= 1.0 - q.powi(-(p.degree().unwrap() as i32));
            }
            assert_eq!(units.len(), expect.round() as usize);
        }
    }

    #[test]
    fn char_eval_examples() {
        let k = FieldTower::new(3, 1, 1).unwrap().base;
        let theta = Gf::from_int(&k, 2);
        assert_eq!(char_eval(&a3(&[0, 1]), &theta), theta);
        assert_eq!(char_eval(&a3(&[1]), &theta), Gf::one(&k));
        // T^2 + 1 at 2 is 5 = 2
        assert_eq!(char_eval(&a3(&[1, 0, 1]), &theta), Gf::from_int(&k, 2));
        let a = a3(&[1, 1]);
        let b = a3(&[2, 0, 1]);
        assert_eq!(char_eval(&(a.clone() * b.clone()), &theta), char_eval(&a, &theta) * char_eval(&b, &theta));
    }
}
