//! The Weil pairing for rank 2: the determinant module ψ = ∧²φ, the
//! pairing on f-torsion and the moduli map (φ, λ) -> (ψ, μ).

use crate::algebra::gf::Gf;
use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::drinfeld::{DrinfeldModule, LevelStructure};
use crate::error::{Error, Result};
use crate::skew::{skew_kernel, SkewPoly};

/// ψ_T = θ − Δτ for φ_T = θ + gτ + Δτ².
pub fn exterior_power2<R: Ring>(phi: &DrinfeldModule<R>) -> Result<DrinfeldModule<R>> {
    if phi.rank() != 2 {
        return Err(Error::Precondition("exterior square needs rank 2".into()));
    }
    let delta = phi.phi_t().coeff(2);
    if delta.inv().is_none() {
        return Err(Error::NotUnit("Δ".into()));
    }
    let theta = phi.theta().clone();
    DrinfeldModule::new(theta.clone(), vec![theta, -delta], phi.q())
}

/// Coordinates of m ∈ K{τ} in the K[T]-basis {1, τ} of the motive
/// M(φ) = K{τ}, where T acts by right multiplication with φ_T.
fn motive_coords<R: Ring>(phi: &DrinfeldModule<R>, m: &SkewPoly<R>) -> Result<[Poly<R>; 2]> {
    let z = phi.theta().zero_like();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut rest = m.clone();
    while !rest.is_zero() {
        let (quot, rem) = rest.right_divmod(phi.phi_t())?;
        a.push(rem.coeff(0));
        b.push(rem.coeff(1));
        rest = quot;
    }
    Ok([Poly::new(a, z.clone()), Poly::new(b, z)])
}

/// Independent computation of ∧²φ from the motive: reads off the
/// semilinear τ-matrix on the basis {1, τ}, takes its determinant d(T) on
/// ∧², and matches τ·(e1∧e2) = d·(e1∧e2) with the rank-1 motive of
/// θ + cτ, where τ·1 = c^{-1}(T − θ).
pub fn motive_oracle<R: Ring>(phi: &DrinfeldModule<R>) -> Result<DrinfeldModule<R>> {
    if phi.rank() != 2 {
        return Err(Error::Precondition("motive oracle needs rank 2".into()));
    }
    let theta = phi.theta().clone();
    let q = phi.q();
    let tau = SkewPoly::tau(&theta, q);
    let col1 = motive_coords(phi, &tau)?;
    let col2 = motive_coords(phi, &(tau.clone() * tau))?;
    let det = col1[0].clone() * col2[1].clone() - col1[1].clone() * col2[0].clone();
    // det = c^{-1}(T − θ) with c ∈ K*
    if det.degree() != Some(1) {
        return Err(Error::Internal("determinant of the τ-matrix is not linear in T".into()));
    }
    let cinv = det.coeff(1);
    if det.coeff(0) != -(cinv.clone() * theta.clone()) {
        return Err(Error::Internal("determinant is not a multiple of T − θ".into()));
    }
    let c = cinv.inv().ok_or_else(|| Error::NotUnit("motive determinant".into()))?;
    DrinfeldModule::new(theta.clone(), vec![theta, c], q)
}

/// Data fixing the pairing: ψ = ∧²φ, a reference basis of φ[f] and the
/// generator t0 of ψ[f].
#[derive(Clone, Debug)]
pub struct PairingContext<R: Ring> {
    pub phi: DrinfeldModule<R>,
    pub psi: DrinfeldModule<R>,
    pub reference: LevelStructure<R>,
    pub t0: R,
}

impl<R: Ring> PairingContext<R> {
    pub fn new(phi: &DrinfeldModule<R>, reference: LevelStructure<R>, t0: R) -> Result<Self> {
        let psi = exterior_power2(phi)?;
        // t0 must generate ψ[f]
        LevelStructure::new(&psi, &reference.f, vec![t0.clone()])?;
        Ok(PairingContext { phi: phi.clone(), psi, reference, t0 })
    }

    /// Coordinates in the reference basis.
    pub fn coords(&self, u: &R) -> Result<Vec<u32>> {
        if !self.phi.image(&self.reference.f).eval(u).is_zero() {
            return Err(Error::NotTorsion);
        }
        self.reference.locate(u).ok_or(Error::NotTorsion)
    }

    /// w(u, v) = ψ_{det(c_u, c_v)}(t0).
    pub fn pair(&self, u: &R, v: &R) -> Result<R> {
        let cu = self.coords(u)?;
        let cv = self.coords(v)?;
        let r = &self.reference.resid;
        let d = r.sub(r.mul(cu[0], cv[1]), r.mul(cu[1], cv[0]));
        Ok(self.psi.image(&r.poly_of(d)).eval(&self.t0))
    }
}

impl PairingContext<Gf> {
    /// Pairing context over the finite field of the torsion points: the
    /// reference basis is the first pair of points in encoding order that
    /// generates φ[f], and t0 is the least generator of ψ[f].
    pub fn from_field(phi: &DrinfeldModule<Gf>, f: &Poly<Gf>) -> Result<Self> {
        let pts = skew_kernel(&phi.image(f))?;
        let expected = (phi.q() as usize).pow(2 * f.degree().unwrap() as u32);
        if pts.len() != expected {
            return Err(Error::Precondition("f-torsion is not rational over the coefficient field".into()));
        }
        let mut reference = None;
        'outer: for u in pts.iter().filter(|p| !p.is_zero()) {
            for v in pts.iter().filter(|p| !p.is_zero()) {
                if let Ok(l) = LevelStructure::new(phi, f, vec![u.clone(), v.clone()]) {
                    reference = Some(l);
                    break 'outer;
                }
            }
        }
        let reference = reference.ok_or_else(|| Error::Internal("no basis of φ[f]".into()))?;
        let psi = exterior_power2(phi)?;
        let tpts = skew_kernel(&psi.image(f))?;
        let t0 = tpts
            .into_iter()
            .find(|t| !t.is_zero() && LevelStructure::new(&psi, f, vec![t.clone()]).is_ok())
            .ok_or_else(|| Error::Internal("ψ[f] has no generator over this field".into()))?;
        Self::new(phi, reference, t0)
    }
}

/// u v^q − u^q v; lies in ψ[T] for u, v ∈ φ[T].
pub fn moore_pair<R: Ring>(u: &R, v: &R, f: &Poly<Gf>, q: u64) -> Result<R> {
    if f.degree() != Some(1) {
        return Err(Error::Precondition("moore_pair needs deg f = 1".into()));
    }
    Ok(u.clone() * v.frob(q) - u.frob(q) * v.clone())
}

/// (φ, λ) -> (ψ, μ) with μ(1) = w(λ(1,0), λ(0,1)).
pub fn weil_map<R: Ring>(
    ctx: &PairingContext<R>,
    level: &LevelStructure<R>,
) -> Result<(DrinfeldModule<R>, LevelStructure<R>)> {
    let mu1 = ctx.pair(&level.basis[0], &level.basis[1])?;
    let mu = LevelStructure::new(&ctx.psi, &level.f, vec![mu1])?;
    Ok((ctx.psi.clone(), mu))
}

/// λ∘σ in the row convention (λ∘σ)(v) = λ(vσ); σ = [a, b, c, d] row-major.
pub fn compose_level<R: Ring>(
    phi: &DrinfeldModule<R>,
    level: &LevelStructure<R>,
    sigma: [u32; 4],
) -> Result<LevelStructure<R>> {
    let b0 = level.point(&[sigma[0], sigma[1]]).clone();
    let b1 = level.point(&[sigma[2], sigma[3]]).clone();
    LevelStructure::new(phi, &level.f, vec![b0, b1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::{FieldTower, GfCtx};
    use crate::algebra::ratfunc::RatFunc;
    use crate::drinfeld::dm_torsion;
    use std::sync::Arc;

    fn f3() -> Arc<GfCtx> {
        FieldTower::new(3, 1, 1).unwrap().base
    }

    fn rank2(g: RatFunc, d: RatFunc) -> DrinfeldModule<RatFunc> {
        let t = RatFunc::t(&Gf::zero(&f3()));
        DrinfeldModule::new(t.clone(), vec![t, g, d], 3).unwrap()
    }

    #[test]
    fn exterior_examples() {
        let t = RatFunc::t(&Gf::zero(&f3()));
        let one = t.one_like();
        let psi = exterior_power2(&rank2(t.zero_like(), one.clone())).unwrap();
        assert_eq!(psi.phi_t().coeff(1), -one.clone());
        let psi = exterior_power2(&rank2(t.zero_like(), -one.clone())).unwrap();
        assert_eq!(psi.phi_t().coeff(1), one.clone());
        for g in [t.zero_like(), t.clone(), t.clone() * t.clone() + one.clone()] {
            let phi = rank2(g, t.clone() + one.clone());
            assert_eq!(motive_oracle(&phi).unwrap(), exterior_power2(&phi).unwrap());
        }
    }

    fn small_phi() -> (DrinfeldModule<Gf>, Poly<Gf>) {
        let k = f3();
        let one = Gf::one(&k);
        let phi = DrinfeldModule::new(one.clone(), vec![one.clone(), Gf::zero(&k), one], 3).unwrap();
        let f = Poly::from_indices(&k, &[0, 1]);
        let tor = dm_torsion(&phi, &f, 12).unwrap();
        // the pairing needs ψ[f] rational too, which holds in the torsion field
        (tor.phi, f)
    }

    #[test]
    fn pairing_basic() {
        let (phi, f) = small_phi();
        let ctx = PairingContext::from_field(&phi, &f).unwrap();
        let b = &ctx.reference.basis;
        assert_eq!(ctx.pair(&b[0], &b[1]).unwrap(), ctx.t0);
        assert!(ctx.pair(&b[0], &b[0]).unwrap().is_zero());
        let pts = ctx.reference.points.clone();
        let q = phi.q();
        let mut ratio: Option<Gf> = None;
        for u in &pts {
            for v in &pts {
                let w = ctx.pair(u, v).unwrap();
                assert_eq!(ctx.pair(v, u).unwrap(), -w.clone());
                let m = moore_pair(u, v, &f, q).unwrap();
                assert!(ctx.psi.image(&f).eval(&m).is_zero());
                if !w.is_zero() {
                    let r = m * w.inv().unwrap();
                    match &ratio {
                        None => ratio = Some(r),
                        Some(r0) => assert_eq!(&r, r0),
                    }
                } else {
                    assert!(m.is_zero());
                }
            }
        }
    }
}
