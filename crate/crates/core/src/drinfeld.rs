//! Drinfeld modules for A = F_q[T], level structures, the Carlitz module
//! and the universal rank-1 module with level f.

use std::sync::Arc;

use crate::algebra::ext::{ExtCtx, ExtElem};
use crate::algebra::gf::{embedding, Gf, GfCtx};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::algebra::residue::{char_eval, ResidueRing};
use crate::algebra::ring::Ring;
use crate::error::{Error, Result};
use crate::skew::{skew_kernel, SkewPoly};

/// Elements of K' = F_q(T)[λ]/(Φ_f).
pub type KPrime = ExtElem<RatFunc>;

/// Default bound for the torsion extension search.
pub const DEFAULT_TORSION_SEARCH: u32 = 12;

/// A Drinfeld module given by θ = γ(T) and φ_T.
#[derive(Clone, Debug, PartialEq)]
pub struct DrinfeldModule<R: Ring> {
    theta: R,
    phi_t: SkewPoly<R>,
}

impl<R: Ring> DrinfeldModule<R> {
    /// Validates φ_T = coeffs[0] + coeffs[1]τ + ... with coeffs[0] = θ.
    pub fn new(theta: R, coeffs: Vec<R>, q: u64) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0] != theta {
            return Err(Error::Precondition("constant coefficient of φ_T must be θ".into()));
        }
        let phi_t = SkewPoly::new(coeffs, q, &theta);
        match phi_t.degree() {
            None | Some(0) => return Err(Error::RankZero),
            _ => {}
        }
        if phi_t.lead().unwrap().inv().is_none() {
            return Err(Error::NotUnit("leading coefficient of φ_T".into()));
        }
        Ok(DrinfeldModule { theta, phi_t })
    }

    /// Builds from φ_T directly.
    pub fn from_phi(phi_t: SkewPoly<R>) -> Result<Self> {
        let theta = phi_t.d0();
        let q = phi_t.q();
        Self::new(theta, phi_t.coeffs().to_vec(), q)
    }

    pub fn theta(&self) -> &R {
        &self.theta
    }
    pub fn phi_t(&self) -> &SkewPoly<R> {
        &self.phi_t
    }
    pub fn q(&self) -> u64 {
        self.phi_t.q()
    }
    pub fn rank(&self) -> usize {
        self.phi_t.degree().unwrap()
    }

    /// φ_a = Σ c_i (φ_T)^i, by Horner.
    pub fn image(&self, a: &Poly<Gf>) -> SkewPoly<R> {
        let q = self.q();
        let mut acc = SkewPoly::zero(&self.theta, q);
        for c in a.coeffs().iter().rev() {
            acc = acc * self.phi_t.clone() + SkewPoly::constant(self.theta.from_base(c), q);
        }
        acc
    }

    /// Like [`image`](Self::image) but drops τ-degrees above `d`.
    pub fn image_trunc(&self, a: &Poly<Gf>, d: usize) -> SkewPoly<R> {
        let q = self.q();
        let mut acc = SkewPoly::zero(&self.theta, q);
        for c in a.coeffs().iter().rev() {
            acc = acc.mul_trunc(&self.phi_t, d) + SkewPoly::constant(self.theta.from_base(c), q);
        }
        acc
    }

    /// The conjugate ξ φ ξ^{-1}.
    pub fn twist(&self, xi: &R) -> Result<Self> {
        let phi_t = self.phi_t.conjugate(xi)?;
        Ok(DrinfeldModule { theta: self.theta.clone(), phi_t })
    }

    /// Whether γ(f) = f(θ) is a unit.
    pub fn away_from_char(&self, f: &Poly<Gf>) -> bool {
        char_eval(f, &self.theta).inv().is_some()
    }

    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> Result<DrinfeldModule<S>> {
        DrinfeldModule::from_phi(self.phi_t.map(zero, f))
    }
}

/// f-torsion points of a module over a finite field, in the smallest
/// extension F_{q^m} where all of them are rational.
#[derive(Clone, Debug)]
pub struct Torsion {
    pub m: u32,
    pub field: Arc<GfCtx>,
    pub phi: DrinfeldModule<Gf>,
    pub points: Vec<Gf>,
}

/// Extension of degree `deg` over the prime field with F_q's base attached
/// (F_q is the base of the field of `theta`).
fn extension_over(base_q: &Arc<GfCtx>, total_over_q: u32) -> Result<Arc<GfCtx>> {
    let t = crate::algebra::gf::FieldTower::over(base_q, total_over_q, crate::algebra::gf::max_field_size())?;
    Ok(t.ext)
}

/// Searches m = 1, 2, ... up to `bound` (in multiples of the degree of the
/// coefficient field over F_q) for full f-torsion.
pub fn dm_torsion(phi: &DrinfeldModule<Gf>, f: &Poly<Gf>, bound: u32) -> Result<Torsion> {
    if !phi.away_from_char(f) {
        return Err(Error::CharacteristicDividesLevel);
    }
    let k = phi.theta().ctx().clone();
    let fq = k.base().cloned().unwrap_or_else(|| k.clone());
    let kdeg = k.degree() / fq.degree();
    let expected = (fq.size() as usize).pow((phi.rank() * f.degree().unwrap()) as u32);
    let mut m = kdeg;
    while m <= bound {
        let big = if m == kdeg { k.clone() } else { extension_over(&fq, m)? };
        let table = embedding(&k, &big).ok_or_else(|| Error::Internal("coefficient field embedding".into()))?;
        let z = Gf::zero(&big);
        let emb = phi.map(&z, |c| Gf::from_index(&big, table[c.index() as usize]))?;
        let pts = skew_kernel(&emb.image(f))?;
        if pts.len() == expected {
            return Ok(Torsion { m, field: big, phi: emb, points: pts });
        }
        m += kdeg;
    }
    Err(Error::TorsionSearchExhausted(bound))
}

/// A level f-structure: the A/fA-linear map (A/fA)^r -> φ[f] fixed by the
/// images of the standard basis vectors.
#[derive(Clone, Debug)]
pub struct LevelStructure<R: Ring> {
    pub f: Poly<Gf>,
    pub resid: Arc<ResidueRing>,
    pub basis: Vec<R>,
    /// λ(v) for every v, indexed by Σ v_i Q^i.
    pub points: Vec<R>,
}

impl<R: Ring> LevelStructure<R> {
    /// Images of e_1..e_r; every point must be f-torsion and the induced
    /// map must be injective.
    pub fn new(phi: &DrinfeldModule<R>, f: &Poly<Gf>, basis: Vec<R>) -> Result<Self> {
        Self::new_with(phi, f, basis, |x| x.is_zero())
    }

    /// As [`new`](Self::new) with a custom zero test (used for points known
    /// only to a precision).
    pub fn new_with(
        phi: &DrinfeldModule<R>,
        f: &Poly<Gf>,
        basis: Vec<R>,
        is_zero: impl Fn(&R) -> bool,
    ) -> Result<Self> {
        let r = phi.rank();
        if basis.len() != r {
            return Err(Error::Precondition(format!("need {r} basis images, got {}", basis.len())));
        }
        let phi_f = phi.image(f);
        for b in &basis {
            if !is_zero(&phi_f.eval(b)) {
                return Err(Error::NotTorsion);
            }
        }
        let resid = ResidueRing::new(f)?;
        let qn = resid.size() as usize;
        let images: Vec<Vec<R>> = basis
            .iter()
            .map(|b| (0..qn as u32).map(|a| phi.image(&resid.poly_of(a)).eval(b)).collect())
            .collect();
        let total = qn.pow(r as u32);
        let mut points = Vec::with_capacity(total);
        for idx in 0..total {
            let mut v = idx;
            let mut acc = basis[0].zero_like();
            for img in &images {
                acc = acc + img[v % qn].clone();
                v /= qn;
            }
            points.push(acc);
        }
        let found = 1 + points.iter().skip(1).filter(|p| !is_zero(p)).count();
        if found != total {
            return Err(Error::NotABasis { found, expected: total });
        }
        Ok(LevelStructure { f: f.clone(), resid, basis, points })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// λ(v) for a coordinate vector of residue indices.
    pub fn point(&self, v: &[u32]) -> &R {
        &self.points[self.index(v)]
    }

    pub fn index(&self, v: &[u32]) -> usize {
        let qn = self.resid.size() as usize;
        v.iter().rev().fold(0, |acc, &c| acc * qn + c as usize)
    }

    pub fn coords(&self, idx: usize) -> Vec<u32> {
        let qn = self.resid.size() as usize;
        let mut v = idx;
        (0..self.rank())
            .map(|_| {
                let c = (v % qn) as u32;
                v /= qn;
                c
            })
            .collect()
    }

    /// Coordinates of a point, by search.
    pub fn locate(&self, p: &R) -> Option<Vec<u32>> {
        self.points.iter().position(|x| x == p).map(|i| self.coords(i))
    }
}

// ---- Carlitz module and cyclotomic polynomials ----

/// C_a as a skew polynomial over A: C_T = T + τ, where τ acts on A by
/// c(T) -> c(T^q).
pub fn carlitz_over_a(a: &Poly<Gf>) -> SkewPoly<Poly<Gf>> {
    let k = a.zero_coeff().clone();
    let q = k.ctx().size();
    let t = Poly::x(&k);
    let ct = SkewPoly::new(vec![t, Poly::constant(k.one_like())], q, &Poly::zero(&k));
    let phi = DrinfeldModule::from_phi(ct).unwrap();
    phi.image(a)
}

/// The additive polynomial Σ a_i X^{q^i} of a skew polynomial.
pub fn additive_poly<R: Ring>(s: &SkewPoly<R>) -> Poly<R> {
    let zero = s.zero_coeff().clone();
    let q = s.q() as usize;
    let mut c = Vec::new();
    for (i, a) in s.coeffs().iter().enumerate() {
        let e = q.pow(i as u32);
        if c.len() <= e {
            c.resize(e + 1, zero.clone());
        }
        c[e] = a.clone();
    }
    Poly::new(c, zero)
}

/// Monic divisors of a monic f with the Möbius value of f/d.
fn divisors_with_mobius(f: &Poly<Gf>) -> Vec<(Poly<Gf>, i32)> {
    let fac = f.factor_trial();
    let mut out = vec![(f.one_like(), Vec::<u32>::new())];
    for (p, e) in &fac {
        let mut next = Vec::new();
        for (d, ex) in &out {
            let mut pk = d.clone();
            for k in 0..=*e {
                let mut ex2 = ex.clone();
                ex2.push(k);
                next.push((pk.clone(), ex2));
                pk = pk * p.clone();
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(d, ex)| {
            // exponents of f/d
            let mut mu = 1;
            for ((_, e), k) in fac.iter().zip(&ex) {
                match e - k {
                    0 => {}
                    1 => mu = -mu,
                    _ => mu = 0,
                }
            }
            (d, mu)
        })
        .collect()
}

/// Φ_f(X) = ∏_{d|f} C_d(X)^{μ(f/d)} in A[X].
pub fn carlitz_cyclotomic(f: &Poly<Gf>) -> Result<Poly<Poly<Gf>>> {
    match f.degree() {
        None | Some(0) => return Err(Error::Precondition("f must be a nonconstant polynomial".into())),
        _ => {}
    }
    let f = f.monic()?;
    let k = f.zero_coeff().clone();
    let one = Poly::constant(Poly::constant(k.one_like()));
    let (mut num, mut den) = (one.clone(), one);
    for (d, mu) in divisors_with_mobius(&f) {
        let c = additive_poly(&carlitz_over_a(&d));
        match mu {
            1 => num = num * c,
            -1 => den = den * c,
            _ => {}
        }
    }
    num.div_exact(&den)
}

/// The universal rank-1 module with level f: ψ_T = T + λ^{q-1}τ over
/// K' = F_q(T)[λ]/(Φ_f), with μ(1) = 1.
#[derive(Clone, Debug)]
pub struct UniversalRank1 {
    pub f: Poly<Gf>,
    pub q: u64,
    pub fq: Arc<GfCtx>,
    pub ring: Arc<ExtCtx<RatFunc>>,
    pub lambda: KPrime,
    pub psi: DrinfeldModule<KPrime>,
    pub resid: Arc<ResidueRing>,
}

pub fn rank1_universal(f: &Poly<Gf>) -> Result<UniversalRank1> {
    let f = f.monic()?;
    let phi = carlitz_cyclotomic(&f)?;
    let k = f.zero_coeff().clone();
    let q = k.ctx().size();
    let rz = RatFunc::from_poly(Poly::zero(&k));
    let modulus = phi.map(&rz, |c| RatFunc::from_poly(c.clone()));
    let ring = ExtCtx::new(modulus, q)?;
    let lambda = ExtElem::gen(&ring);
    let t = ExtElem::scalar(&ring, RatFunc::t(&k));
    let psi = DrinfeldModule::new(t.clone(), vec![t, lambda.pow(q - 1)], q)?;
    let one = lambda.one_like();
    if !psi.image(&f).eval(&one).is_zero() {
        return Err(Error::Internal("ψ_f(1) != 0 in R'".into()));
    }
    let resid = ResidueRing::new(&f)?;
    Ok(UniversalRank1 { f, q, fq: k.ctx().clone(), ring, lambda, psi, resid })
}

impl UniversalRank1 {
    pub fn t(&self) -> KPrime {
        self.psi.theta().clone()
    }

    pub fn scalar(&self, a: &Poly<Gf>) -> KPrime {
        ExtElem::scalar(&self.ring, RatFunc::from_poly(a.clone()))
    }

    /// Whether every coefficient has denominator dividing a power of f
    /// (membership in R' = A_f[λ]).
    pub fn in_r_prime(&self, x: &KPrime) -> bool {
        x.coeffs().iter().all(|c| c.as_af(&self.f).is_some())
    }

    /// Membership in R' ∩ A_f(T)[λ^{q-1}], the ring R of the level-f moduli.
    pub fn in_r(&self, x: &KPrime) -> bool {
        let step = (self.q - 1) as usize;
        self.in_r_prime(x) && x.coeffs().iter().enumerate().all(|(i, c)| i % step == 0 || c.is_zero())
    }

    /// The Galois automorphism λ -> C_d(λ) of K' for a unit class d.
    pub fn galois(&self, d: u32, x: &KPrime) -> Result<KPrime> {
        if !self.resid.is_unit(d) {
            return Err(Error::NotUnit("Galois element must be a unit mod f".into()));
        }
        let img = self.carlitz_eval(&self.resid.poly_of(d), &self.lambda);
        Ok(x.eval_at(&img, |c| ExtElem::scalar(&self.ring, c.clone())))
    }

    /// C_a(y) for y in K'.
    pub fn carlitz_eval(&self, a: &Poly<Gf>, y: &KPrime) -> KPrime {
        let c = carlitz_over_a(a);
        c.eval_in(y, |p| ExtElem::scalar(&self.ring, RatFunc::from_poly(p.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::FieldTower;
    use crate::algebra::residue::residue_units;

    fn f3() -> Arc<GfCtx> {
        FieldTower::new(3, 1, 1).unwrap().base
    }

    fn a3(idx: &[u32]) -> Poly<Gf> {
        Poly::from_indices(&f3(), idx)
    }

    fn carlitz_ratfunc() -> DrinfeldModule<RatFunc> {
        let t = RatFunc::t(&Gf::zero(&f3()));
        DrinfeldModule::new(t.clone(), vec![t.clone(), t.one_like()], 3).unwrap()
    }

    #[test]
    fn make_validates() {
        let phi = carlitz_ratfunc();
        assert_eq!(phi.rank(), 1);
        let t = phi.theta().clone();
        assert!(matches!(DrinfeldModule::new(t.clone(), vec![t.clone()], 3), Err(Error::RankZero)));
        let g = t.clone() + t.one_like();
        assert_eq!(DrinfeldModule::new(t.clone(), vec![t.clone(), g, t.one_like()], 3).unwrap().rank(), 2);
    }

    #[test]
    fn image_examples() {
        let phi = carlitz_ratfunc();
        let t = phi.theta().clone();
        let sq = phi.image(&a3(&[0, 0, 1]));
        assert_eq!(sq.coeffs(), &[t.clone() * t.clone(), t.clone() + t.pow(3), t.one_like()]);
        assert_eq!(phi.image(&a3(&[1])), SkewPoly::one(&t, 3));
        assert_eq!(phi.image(&a3(&[2])), SkewPoly::constant(-t.one_like(), 3));
        assert_eq!(phi.image(&a3(&[1, 2, 1])).degree(), Some(2));
    }

    #[test]
    fn torsion_examples() {
        let k = f3();
        let theta = Gf::from_int(&k, 2);
        let c = DrinfeldModule::new(theta.clone(), vec![theta.clone(), Gf::one(&k)], 3).unwrap();
        let tor = dm_torsion(&c, &a3(&[0, 1]), DEFAULT_TORSION_SEARCH).unwrap();
        assert_eq!(tor.m, 1);
        assert_eq!(tor.points.iter().map(|p| p.index()).collect::<Vec<_>>(), vec![0, 1, 2]);
        let one = Gf::one(&k);
        let phi2 = DrinfeldModule::new(one.clone(), vec![one.clone(), Gf::zero(&k), one.clone()], 3).unwrap();
        let tor = dm_torsion(&phi2, &a3(&[0, 1]), DEFAULT_TORSION_SEARCH).unwrap();
        assert_eq!(tor.points.len(), 9);
        let z = Gf::zero(&k);
        let bad = DrinfeldModule::new(z.clone(), vec![z.clone(), one], 3).unwrap();
        assert!(matches!(dm_torsion(&bad, &a3(&[0, 1]), 12), Err(Error::CharacteristicDividesLevel)));
    }

    #[test]
    fn level_structures() {
        let k = f3();
        let one = Gf::one(&k);
        let phi2 = DrinfeldModule::new(one.clone(), vec![one.clone(), Gf::zero(&k), one.clone()], 3).unwrap();
        let f = a3(&[0, 1]);
        let tor = dm_torsion(&phi2, &f, 12).unwrap();
        let pts = &tor.points;
        let u = pts[1].clone();
        let v = pts.iter().find(|p| !p.is_zero() && **p != u.clone() && **p != -u.clone()).unwrap().clone();
        let lvl = LevelStructure::new(&tor.phi, &f, vec![u.clone(), v]).unwrap();
        let mut sorted = lvl.points.clone();
        sorted.sort();
        assert_eq!(&sorted, pts);
        assert!(matches!(
            LevelStructure::new(&tor.phi, &f, vec![u.clone(), -u]),
            Err(Error::NotABasis { .. })
        ));
    }

    #[test]
    fn cyclotomic() {
        let phi = carlitz_cyclotomic(&a3(&[0, 1])).unwrap();
        let x = Poly::x(&Gf::zero(&f3()));
        // X^2 + T
        assert_eq!(phi.coeffs(), &[x.clone(), Poly::zero(&Gf::zero(&f3())), x.one_like()]);
        for f in [a3(&[0, 0, 1]), a3(&[1, 0, 1]), a3(&[2, 0, 1]), a3(&[0, 1, 1])] {
            let phi = carlitz_cyclotomic(&f).unwrap();
            assert_eq!(phi.degree().unwrap(), residue_units(&f).unwrap().len());
            let cf = additive_poly(&carlitz_over_a(&f));
            assert!(cf.rem(&phi).unwrap().is_zero());
        }
        assert!(carlitz_cyclotomic(&a3(&[1])).is_err());
    }

    #[test]
    fn universal_examples() {
        let u = rank1_universal(&a3(&[0, 1])).unwrap();
        let t = u.t();
        // λ² = -T so ψ_T = T - Tτ
        assert_eq!(u.psi.phi_t().coeff(1), -t.clone());
        let u2 = rank1_universal(&a3(&[0, 0, 1])).unwrap();
        assert_eq!(u2.ring.degree(), 6);
        assert!(u2.in_r(&u2.psi.phi_t().coeff(1)));
        assert!(!u2.in_r(&u2.lambda));
    }

    #[test]
    fn twist_examples() {
        let u = rank1_universal(&a3(&[0, 1])).unwrap();
        let t = u.t();
        let carlitz = DrinfeldModule::new(t.clone(), vec![t.clone(), t.one_like()], 3).unwrap();
        let psi = carlitz.twist(&u.lambda.inv().unwrap()).unwrap();
        assert_eq!(psi, u.psi);
        assert_eq!(carlitz.twist(&t.one_like()).unwrap(), carlitz);
        let xi = u.lambda.clone() + t.clone();
        let back = carlitz.twist(&xi).unwrap().twist(&xi.inv().unwrap()).unwrap();
        assert_eq!(back, carlitz);
    }
}
