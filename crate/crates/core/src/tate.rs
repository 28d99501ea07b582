//! The Tate-Drinfeld module over R'[[x]]: lattice, lattice exponential,
//! the rank-2 module φ^td = e ψ e^{-1}, its level structure, the maps h_σ
//! for σ ∈ N, the universal assembly over Gl2/N and the expansion of 1/j.

use crate::algebra::ext::ExtElem;
use crate::algebra::gf::Gf;
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::RatFunc;
use crate::algebra::ring::Ring;
use crate::algebra::series::Series;
use crate::cusps::{self, Mat};
use crate::drinfeld::{DrinfeldModule, KPrime, LevelStructure, UniversalRank1};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::skew::{tau_series_invert, SkewPoly};

/// Laurent series in x over K'.
pub type XSeries = Series<KPrime>;

/// Default precision slack.
pub const DEFAULT_SLACK: i64 = 4;

/// Extra τ-degrees computed beyond 2·deg a to witness vanishing.
const EXTRA_TAU: usize = 2;

/// The lattice Λ = {ψ_a(ℓ) : a ∈ A} with ℓ = ψ_f(1/x).
#[derive(Clone, Debug)]
pub struct TateLattice {
    pub u: UniversalRank1,
    pub ell: XSeries,
    pub psi_x: DrinfeldModule<XSeries>,
}

fn xs_zero(u: &UniversalRank1) -> XSeries {
    Series::exact(0, vec![], &ExtElem::zero(&u.ring))
}

fn xs_scalar(c: &KPrime) -> XSeries {
    Series::scalar(c.clone())
}

pub fn tate_lattice(u: &UniversalRank1) -> Result<TateLattice> {
    let z = xs_zero(u);
    let psi_x = u.psi.map(&z, xs_scalar)?;
    let inv_x = Series::monomial(u.lambda.one_like(), -1);
    let ell = psi_x.image(&u.f).eval(&inv_x);
    Ok(TateLattice { u: u.clone(), ell, psi_x })
}

impl TateLattice {
    /// ψ_b(ℓ) for b ∈ A; the lattice point of fb.
    pub fn point(&self, b: &Poly<Gf>) -> XSeries {
        self.psi_x.image(b).eval(&self.ell)
    }

    /// Lattice points b·ℓ with deg b <= d − deg f, together with b.
    pub fn shell(&self, d: usize) -> Vec<(Poly<Gf>, XSeries)> {
        let df = self.u.f.degree().unwrap();
        if d < df {
            return vec![];
        }
        let n = (d - df + 1) as u32;
        let q = self.u.q;
        let k = self.u.fq.clone();
        (0..q.pow(n))
            .map(|mut i| {
                let mut c = Vec::new();
                for _ in 0..n {
                    c.push(Gf::from_index(&k, (i % q) as u32));
                    i /= q;
                }
                let b = Poly::new(c, Gf::zero(&k));
                let p = self.point(&b);
                (b, p)
            })
            .collect()
    }
}

/// e_Λ = Σ s_i τ^i as a finite product over the lattice shells that matter
/// modulo x^{prec}.
#[derive(Clone, Debug)]
pub struct LatticeExp {
    pub e: SkewPoly<XSeries>,
    /// Coefficient i is exact below x^{prec + grade(i)}.
    pub prec: i64,
    /// Smallest valuation of a shell factor; sets the grading.
    pub vmin: i64,
    pub shells: usize,
}

impl LatticeExp {
    /// Extra precision of coefficient i: a term of e_i that involves an
    /// omitted factor picks up at least vmin from each of the other i − 1
    /// factors, twisted by q, ..., q^{i−1}.
    pub fn grade(&self, i: usize, q: u64) -> i64 {
        grade(self.vmin, i, q)
    }
}

fn grade(vmin: i64, i: usize, q: u64) -> i64 {
    if i <= 1 {
        return 0;
    }
    let q = q as i64;
    // vmin (q + ... + q^{i-1})
    let mut acc: i64 = 0;
    let mut p = 1i64;
    for _ in 1..i {
        p = p.saturating_mul(q);
        acc = acc.saturating_add(p);
    }
    vmin.saturating_mul(acc)
}

/// Builds e from w_k = ψ_{T^k}(ℓ) by e_{k+1} = (1 − e_k(w_k)^{1−q} τ)∘e_k,
/// stopping once the new factor is ≡ 1 modulo x^{n+1}.
pub fn lattice_exp(l: &TateLattice, n: i64) -> Result<LatticeExp> {
    if n < 1 {
        return Err(Error::Precision("N must be at least 1".into()));
    }
    let target = n + 1;
    let mut guard = DEFAULT_SLACK;
    loop {
        let r = lattice_exp_at(l, target, target + guard)?;
        if r.prec >= target {
            let e = pad_graded(&truncate_graded(&r.e, target, r.vmin), target, r.vmin);
            return Ok(LatticeExp { prec: target, e, vmin: r.vmin, shells: r.shells });
        }
        guard *= 2;
        if guard > 64 * target {
            return Err(Error::Precision(format!("lattice exponential stuck at precision {}", r.prec)));
        }
    }
}

fn truncate_graded(s: &SkewPoly<XSeries>, p: i64, vmin: i64) -> SkewPoly<XSeries> {
    let z = s.zero_coeff().clone();
    let q = s.q();
    SkewPoly::new(
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { c.clone() } else { c.truncate(p.saturating_add(grade(vmin, i, q))) })
            .collect(),
        q,
        &z,
    )
}

/// The omitted shells also reach τ-degrees past the computed product;
/// record those coefficients as O(x^{p + grade(i)}) instead of exact zeros.
fn pad_graded(s: &SkewPoly<XSeries>, p: i64, vmin: i64) -> SkewPoly<XSeries> {
    let z = s.zero_coeff().clone();
    let q = s.q();
    let mut c = s.coeffs().to_vec();
    let top = c.len().max(3) + EXTRA_TAU;
    while c.len() < top {
        let i = c.len();
        c.push(Series::big_o(p.saturating_add(grade(vmin, i, q)), z.zero_coeff()));
    }
    SkewPoly::new(c, q, &z)
}

fn truncate_skew(s: &SkewPoly<XSeries>, p: i64) -> SkewPoly<XSeries> {
    let z = s.zero_coeff().clone();
    SkewPoly::new(
        s.coeffs().iter().enumerate().map(|(i, c)| if i == 0 { c.clone() } else { c.truncate(p) }).collect(),
        s.q(),
        &z,
    )
}

fn lattice_exp_at(l: &TateLattice, target: i64, work: i64) -> Result<LatticeExp> {
    let q = l.u.q;
    let z = xs_zero(&l.u);
    let mut e = SkewPoly::one(&z, q);
    let t = Poly::x(&Gf::zero(&l.u.fq));
    let mut w = l.ell.clone();
    let mut shells = 0;
    let mut vmin: Option<i64> = None;
    let mut last = i64::MIN;
    loop {
        let y = e.eval(&w);
        let v = y.valuation().ok_or_else(|| Error::Precision("lattice point vanished at working precision".into()))?;
        // c = y^{1-q} has valuation (1-q)·v
        let vc = (1 - q as i64) * v;
        // the grading assumes later shells never get smaller
        if vc < last {
            return Err(Error::Internal("shell valuations are not increasing".into()));
        }
        last = vc;
        vmin.get_or_insert(vc);
        if vc >= target {
            break;
        }
        // enough relative precision of y for c mod x^work
        let rel = work - vc;
        let yt = y.truncate(v + rel);
        let c = yt.pow(q - 1).invert()?;
        let factor = SkewPoly::new(vec![z.one_like(), -c], q, &z);
        e = factor * e;
        shells += 1;
        w = l.psi_x.image(&t).eval(&w);
    }
    let vmin = vmin.unwrap_or(target);
    // omitted factors are ≡ 1 mod x^{target}; computed ones carry their own precision
    let prec = e
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, c)| c.prec().map(|p| p - grade(vmin, i, q)))
        .min()
        .unwrap_or(work);
    Ok(LatticeExp { e, prec, vmin, shells })
}

/// The Tate-Drinfeld module with its level structure.
#[derive(Clone, Debug)]
pub struct TateExpansion {
    pub lattice: TateLattice,
    pub n: i64,
    pub exp: LatticeExp,
    pub e_inv: SkewPoly<XSeries>,
    pub phi: DrinfeldModule<XSeries>,
    /// λ^td(1,0) = e(1/x), λ^td(0,1) = e(1).
    pub level: LevelStructure<XSeries>,
    /// Precision to which φ^td_T and the level points are exact.
    pub achieved: i64,
}

impl TateExpansion {
    pub fn q(&self) -> u64 {
        self.lattice.u.q
    }
    pub fn u(&self) -> &UniversalRank1 {
        &self.lattice.u
    }
    pub fn g(&self) -> XSeries {
        self.phi.phi_t().coeff(1)
    }
    pub fn delta(&self) -> XSeries {
        self.phi.phi_t().coeff(2)
    }

    /// φ^td_a computed as e ψ_a e^{-1}, up to τ-degree `d`.
    pub fn conj_image(&self, a: &Poly<Gf>, d: usize) -> SkewPoly<XSeries> {
        let psi_a = self.lattice.psi_x.image(a);
        self.exp.e.mul_trunc(&psi_a, d).mul_trunc(&self.e_inv, d)
    }
}

pub fn tate_module(l: &TateLattice, n: i64) -> Result<TateExpansion> {
    let exp = lattice_exp(l, n)?;
    let p = exp.prec;
    let q = l.u.q;
    let dmax = 2 + EXTRA_TAU;
    let e_inv = truncate_skew(&tau_series_invert(&exp.e, dmax)?, p);
    let t = Poly::x(&Gf::zero(&l.u.fq));
    let psi_t = l.psi_x.image(&t);
    let full = exp.e.mul_trunc(&psi_t, dmax).mul_trunc(&e_inv, dmax);
    for i in 3..=dmax {
        let c = full.coeff(i);
        if !c.truncate(p).is_zero() {
            return Err(Error::Internal(format!("φ^td_T has a τ^{i} term below x^{p}")));
        }
    }
    let z = xs_zero(&l.u);
    let coeffs: Vec<XSeries> = (0..=2).map(|i| if i == 0 { full.coeff(0) } else { full.coeff(i).truncate(p) }).collect();
    if coeffs[2].valuation().is_none() {
        return Err(Error::Precision(format!(
            "Δ vanishes modulo x^{p}; increase N beyond {}",
            (q as i64 - 1) * (q as i64).pow(l.u.f.degree().unwrap() as u32)
        )));
    }
    let phi = DrinfeldModule::from_phi(SkewPoly::new(coeffs, q, &z))?;
    let one = l.u.lambda.one_like();
    let inv_x = Series::monomial(one.clone(), -1);
    let l10 = exp.e.eval(&inv_x);
    let l01 = exp.e.eval(&Series::scalar(one));
    let level = LevelStructure::new_with(&phi, &l.u.f, vec![l10, l01], |s: &XSeries| s.is_zero())?;
    let mut achieved = p;
    for c in phi.phi_t().coeffs().iter().chain(level.basis.iter()) {
        if let Some(pp) = c.prec() {
            achieved = achieved.min(pp);
        }
    }
    Ok(TateExpansion { lattice: l.clone(), n, exp, e_inv, phi, level, achieved })
}

/// Convenience: universal module, lattice and expansion for f at precision N.
pub fn tate_for(f: &Poly<Gf>, n: i64) -> Result<TateExpansion> {
    let u = crate::drinfeld::rank1_universal(f)?;
    let l = tate_lattice(&u)?;
    tate_module(&l, n)
}

/// Coefficientwise agreement of e∘ψ_a and φ^td_a∘e; returns the exponent
/// below which they agree.
pub fn functional_equation(tx: &TateExpansion, a: &Poly<Gf>) -> Result<i64> {
    let da = a.degree().unwrap_or(0);
    let d = 2 * da + tx.exp.e.degree().unwrap_or(0) + EXTRA_TAU;
    let lhs = tx.exp.e.mul_trunc(&tx.lattice.psi_x.image(a), d);
    let rhs = tx.phi.image_trunc(a, d).mul_trunc(&tx.exp.e, d);
    let cap = tx.achieved;
    let mut agree = cap;
    for i in 0..=d {
        agree = agree.min(lhs.coeff(i).agreement(&rhs.coeff(i), cap));
    }
    Ok(agree)
}

/// Every coefficient of g, Δ and s_i lies in R (polynomial in λ^{q-1}
/// over A_f).
pub fn subring_check(tx: &TateExpansion) -> bool {
    let u = tx.u();
    let ok = |s: &XSeries| s.terms().all(|(_, c)| u.in_r(c));
    tx.phi.phi_t().coeffs().iter().all(ok) && tx.exp.e.coeffs().iter().all(ok)
}

/// 1/j_a = b_{2d}/b_d^{q^d+1} = α·x^k.
#[derive(Clone, Debug)]
pub struct JExpansion {
    pub k: i64,
    pub alpha: XSeries,
}

pub fn j_expansion(tx: &TateExpansion, a: &Poly<Gf>) -> Result<JExpansion> {
    let d = a.degree().filter(|&d| d >= 1).ok_or_else(|| Error::Precondition("a must be nonconstant".into()))?;
    let phi_a = tx.phi.image_trunc(a, 2 * d);
    let bd = phi_a.coeff(d);
    let b2d = phi_a.coeff(2 * d);
    let q = tx.q();
    let vb = bd.valuation().ok_or_else(|| Error::Precision("b_d unresolved".into()))?;
    if vb != 0 {
        return Err(Error::Internal("b_d is not a unit of R'[[x]]".into()));
    }
    let denom = bd.pow(q.pow(d as u32) + 1);
    let inv_j = b2d * denom.invert()?;
    let k = inv_j
        .valuation()
        .ok_or_else(|| Error::Precision(format!("1/j vanishes modulo x^{:?}", inv_j.prec())))?;
    let alpha = inv_j.shift(-k);
    Ok(JExpansion { k, alpha })
}

// ---- h_σ and the universal assembly ----

pub use crate::cusps::in_n;

/// Result of checking h_σ(φ^td, λ^td) ≅ (φ^td, λ^td∘σ).
#[derive(Clone, Debug)]
pub struct HSigma {
    pub sigma: Mat,
    pub delta: XSeries,
    pub xi: KPrime,
    /// Exponent below which all compared coefficients agree.
    pub achieved: i64,
}

/// Applies the ring map (Galois action of d on K', x -> δx) to a series.
fn apply_h(u: &UniversalRank1, d: u32, delta_x: &XSeries, s: &XSeries) -> Result<XSeries> {
    let z = s.zero_coeff().clone();
    s.try_map(&z, |c| u.galois(d, c))?.subst(delta_x)
}

/// Target points (λ^td∘σ)(e_1), (λ^td∘σ)(e_2).
fn target_points(tx: &TateExpansion, s: &Mat) -> [XSeries; 2] {
    [tx.level.point(&[s[0], s[1]]).clone(), tx.level.point(&[s[2], s[3]]).clone()]
}

/// For σ ∉ N: any isomorphism over R'[[x]] built from a ring map
/// x -> δx (δ a unit) and a conjugating unit of valuation 0 preserves
/// x-valuations of torsion points, so a valuation mismatch between λ^td
/// and λ^td∘σ rules out h_σ. Returns a description of the mismatch.
pub fn valuation_obstruction(tx: &TateExpansion, s: &Mat) -> Option<String> {
    let tgt = target_points(tx, s);
    for (j, t) in tgt.iter().enumerate() {
        let want = tx.level.basis[j].valuation();
        if t.valuation() != want {
            return Some(format!(
                "(λ∘σ)(e_{}) has valuation {:?}, λ(e_{}) has {:?}",
                j + 1,
                t.valuation(),
                j + 1,
                want
            ));
        }
    }
    None
}

/// Builds δ and ξ from σ by δ^{-1} = ξ(σ11 + ψ_{σ12}(1)·x), ξ = λ/C_d(λ),
/// and measures how well h_σ(φ^td, λ^td) matches ξ·(φ^td, λ^td∘σ).
/// The construction is applied as an ansatz even when σ ∉ N; use
/// [`h_sigma`] for the validated version.
pub fn h_sigma_ansatz(tx: &TateExpansion, s: &Mat) -> Result<HSigma> {
    let u = tx.u();
    let r = &u.resid;
    let d = s[3];
    if !r.is_unit(d) {
        return Err(Error::NotUnit("σ22".into()));
    }
    let cd = u.carlitz_eval(&r.poly_of(d), &u.lambda);
    let xi = u.lambda.clone() * cd.inv().ok_or_else(|| Error::NotUnit("C_d(λ)".into()))?;
    let one = u.lambda.one_like();
    let a_term = u.psi.image(&r.poly_of(s[0])).eval(&one);
    let b_term = u.psi.image(&r.poly_of(s[1])).eval(&one);
    let prec = tx.achieved + 2;
    let dinv = Series::new(0, vec![xi.clone() * a_term, xi.clone() * b_term], Some(prec), &one.zero_like());
    let delta = dinv.invert().map_err(|_| Error::NotInN("δ^{-1} is not a unit".into()))?;
    let delta_x = delta.shift(1);
    let q = tx.q();
    let mut achieved = tx.achieved;
    // h(φ^td_T) coefficient i vs ξ^{1-q^i} c_i
    for (i, c) in tx.phi.phi_t().coeffs().iter().enumerate() {
        let lhs = apply_h(u, d, &delta_x, c)?;
        let xp = xi.pow(q.pow(i as u32)).inv().unwrap() * xi.clone();
        let rhs = c.scale(&xp);
        achieved = achieved.min(lhs.agreement(&rhs, tx.achieved));
    }
    let tgt = target_points(tx, s);
    for j in 0..2 {
        let lhs = apply_h(u, d, &delta_x, &tx.level.basis[j])?;
        let rhs = tgt[j].scale(&xi);
        achieved = achieved.min(lhs.agreement(&rhs, tx.achieved));
    }
    Ok(HSigma { sigma: *s, delta, xi, achieved })
}

/// h_σ for σ ∈ N; σ ∉ N is rejected with the detected obstruction.
pub fn h_sigma(tx: &TateExpansion, s: &Mat) -> Result<HSigma> {
    if !in_n(&tx.u().resid, s) {
        let why = valuation_obstruction(tx, s).unwrap_or_else(|| "matrix is not upper triangular with σ11 ∈ F_q*".into());
        return Err(Error::NotInN(why));
    }
    h_sigma_ansatz(tx, s)
}

/// One copy of the Tate-Drinfeld data per left coset σ_i N.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub reps: Vec<Mat>,
    pub copies: Vec<LevelStructure<XSeries>>,
}

pub fn universal_assembly(tx: &TateExpansion, exec: Execution) -> Result<Assembly> {
    let r = &tx.u().resid;
    let reps = cusps::coset_reps(r, exec);
    let copies = exec.map(&reps, |s| crate::weil::compose_level(&tx.phi, &tx.level, *s));
    let copies = copies.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Assembly { reps, copies })
}

impl Assembly {
    /// The copy i with σ_i^{-1}σ ∈ N, and n = σ_i^{-1}σ.
    pub fn locate(&self, r: &crate::algebra::residue::ResidueRing, s: &Mat) -> Result<(usize, Mat)> {
        for (i, rep) in self.reps.iter().enumerate() {
            let inv = cusps::mat_inv(r, rep).ok_or_else(|| Error::Internal("singular coset representative".into()))?;
            let n = cusps::mat_mul(r, &inv, s);
            if in_n(r, &n) {
                return Ok((i, n));
            }
        }
        Err(Error::Precondition("matrix is not invertible".into()))
    }

    /// Checks that copy i transported by h_n reproduces λ^td∘σ up to ξ.
    pub fn verify(&self, tx: &TateExpansion, s: &Mat) -> Result<(usize, i64)> {
        let u = tx.u();
        let r = &u.resid;
        let (i, n) = self.locate(r, s)?;
        let h = h_sigma(tx, &n)?;
        let delta_x = h.delta.shift(1);
        let copy = &self.copies[i];
        let tgt = target_points(tx, s);
        let mut achieved = h.achieved;
        for j in 0..2 {
            let lhs = apply_h(u, n[3], &delta_x, &copy.basis[j])?;
            let rhs = tgt[j].scale(&h.xi);
            achieved = achieved.min(lhs.agreement(&rhs, tx.achieved));
        }
        Ok((i, achieved))
    }
}

// ---- specialization R' -> finite field ----

/// Tate data after specialization.
#[derive(Clone, Debug)]
pub struct SpecialTate {
    pub phi: DrinfeldModule<Series<Gf>>,
    pub level: LevelStructure<Series<Gf>>,
    pub e: SkewPoly<Series<Gf>>,
    pub psi: DrinfeldModule<Series<Gf>>,
    pub ell: Series<Gf>,
}

/// The ring map R' -> F_{q^m} given by T -> t and λ -> l.
#[derive(Clone, Debug)]
pub struct Specialization {
    pub t: Gf,
    pub lambda: Gf,
}

impl Specialization {
    /// T -> 1 and λ -> the least root of Φ_f(1, X) in the smallest field
    /// containing one.
    pub fn standard(u: &UniversalRank1) -> Result<Self> {
        for m in 1..=6u32 {
            let tower = crate::algebra::gf::FieldTower::over(&u.fq, m, crate::algebra::gf::max_field_size())?;
            let big = tower.ext.clone();
            let t = Gf::one(&big);
            let phi = u.ring.modulus();
            for cand in Gf::elements(&big) {
                let val = phi.eval_with(&cand, |c: &RatFunc| c.eval_in(&t).unwrap_or_else(|| t.zero_like()));
                if val.is_zero() {
                    return Ok(Specialization { t, lambda: cand });
                }
            }
        }
        Err(Error::Precondition("no root of Φ_f at T = 1 in small fields".into()))
    }

    pub fn apply(&self, x: &KPrime) -> Result<Gf> {
        let mut acc = self.t.zero_like();
        let mut pw = self.t.one_like();
        for c in x.coeffs() {
            let v = c.eval_in(&self.t).ok_or_else(|| Error::Precondition("pole at the specialization point".into()))?;
            acc = acc + v * pw.clone();
            pw = pw * self.lambda.clone();
        }
        Ok(acc)
    }

    pub fn series(&self, s: &XSeries) -> Result<Series<Gf>> {
        let z = self.t.zero_like();
        s.try_map(&z, |c| self.apply(c))
    }

    pub fn skew(&self, s: &SkewPoly<XSeries>) -> Result<SkewPoly<Series<Gf>>> {
        let z = Series::exact(0, vec![], &self.t.zero_like());
        let c = s.coeffs().iter().map(|c| self.series(c)).collect::<Result<Vec<_>>>()?;
        Ok(SkewPoly::new(c, s.q(), &z))
    }

    /// φ^td, λ^td, e, ψ and ℓ carried to F_{q^m}((x)).
    pub fn tate_data(&self, tx: &TateExpansion) -> Result<SpecialTate> {
        let phi = DrinfeldModule::from_phi(self.skew(tx.phi.phi_t())?)?;
        let basis = tx.level.basis.iter().map(|b| self.series(b)).collect::<Result<Vec<_>>>()?;
        let level = LevelStructure::new(&phi, &tx.u().f, basis)?;
        let e = self.skew(&tx.exp.e)?;
        let z = Series::exact(0, vec![], &self.t.zero_like());
        let psi = tx.u().psi.phi_t().coeffs().iter().map(|c| self.apply(c).map(Series::scalar)).collect::<Result<Vec<_>>>()?;
        let psi = DrinfeldModule::from_phi(SkewPoly::new(psi, tx.q(), &z))?;
        let ell = self.series(&tx.lattice.ell)?;
        Ok(SpecialTate { phi, level, e, psi, ell })
    }
}
