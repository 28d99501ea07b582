//! Stable reduction over V = F[[x]], F a finite field: Newton polygons, the
//! normal form with integral torsion, Drinfeld's successive approximation,
//! lattice recovery and the extraction of (ψ, μ, ℓ).
//!
//! The uniformizer is the series variable x. Precision is tracked by the
//! series arithmetic; an `achieved` field is an exponent below which the
//! checked quantity is known to vanish (or agree).

use crate::algebra::gf::Gf;
use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::algebra::series::Series;
use crate::drinfeld::{DrinfeldModule, LevelStructure};
use crate::error::{Error, Result};
pub use crate::skew::tau_series_invert;
use crate::skew::SkewPoly;

pub type LocalFieldElement = Series<Gf>;
type Lfe = LocalFieldElement;

/// Precision a result may lose to cancellation before it is rejected.
pub const DEFAULT_SLACK: i64 = 4;

/// Largest τ-degree the adaptive routines try.
pub const MAX_TAU_DEGREE: usize = 6;

/// Candidate cap for the digit search.
const MAX_CANDIDATES: usize = 1 << 16;

fn q_pow(q: u64, i: usize) -> Result<i64> {
    q.checked_pow(i as u32)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::Config(format!("q^{i} overflows")))
}

fn x_pow(template: &Lfe, k: i64) -> Lfe {
    Series::monomial(template.zero_coeff().one_like(), k)
}

// ---- Newton polygons ----

/// One edge of a Newton polygon; slope rise/run, `run` roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub rise: i64,
    pub run: u64,
}

impl Segment {
    /// The slope when it is an integer.
    pub fn slope(&self) -> Option<i64> {
        let run = self.run as i64;
        (self.rise % run == 0).then(|| self.rise / run)
    }
}

fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut h: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
            if cross <= 0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

/// Newton polygon of (1/X)·Σ a_i X^{q^i}: lower hull of the points
/// (q^i − 1, v(a_i)), edges in order of increasing slope.
pub fn newton_slopes(a: &SkewPoly<Lfe>) -> Result<Vec<Segment>> {
    let q = a.q();
    let deg = a.coeffs().len().checked_sub(1).ok_or(Error::ZeroPolynomial("Newton polygon"))?;
    if a.coeff(0).valuation().is_none() || a.coeff(deg).valuation().is_none() {
        return Err(Error::Precision("end coefficients of the Newton polygon are unresolved".into()));
    }
    let mut known = Vec::new();
    let mut bounds = Vec::new();
    for (i, c) in a.coeffs().iter().enumerate() {
        let x = q_pow(q, i)? - 1;
        match (c.valuation(), c.prec()) {
            (Some(v), _) => known.push((x, v)),
            (None, Some(p)) => bounds.push((i, x, p)),
            (None, None) => {}
        }
    }
    let hull = lower_hull(&known);
    // an O(x^p) coefficient is harmless only if p lies strictly above the hull
    for (i, x, p) in bounds {
        let w = hull.windows(2).find(|w| w[0].0 <= x && x <= w[1].0).unwrap();
        let (x1, y1, x2, y2) = (w[0].0 as i128, w[0].1 as i128, w[1].0 as i128, w[1].1 as i128);
        if (p as i128) * (x2 - x1) <= y1 * (x2 - x1) + (y2 - y1) * (x as i128 - x1) {
            return Err(Error::Precision(format!("valuation of coefficient {i} is not resolved modulo x^{p}")));
        }
    }
    Ok(hull.windows(2).map(|w| Segment { rise: w[1].1 - w[0].1, run: (w[1].0 - w[0].0) as u64 }).collect())
}

fn integral_slopes(s: &[Segment]) -> Result<Vec<i64>> {
    s.iter()
        .map(|g| g.slope().ok_or_else(|| Error::NonIntegralSlope(format!("edge with rise {} over run {}", g.rise, g.run))))
        .collect()
}

// ---- normal form ----

#[derive(Clone, Debug)]
pub struct StableForm {
    /// φ' = x^{-k} φ x^{k}: coefficients a_i x^{k(q^i − 1)}.
    pub phi: DrinfeldModule<Lfe>,
    /// Largest valuation of a nonzero f-torsion point of φ.
    pub k: i64,
    /// Rank of φ' mod x; 2 means good reduction.
    pub reduction_rank: usize,
    pub slopes: Vec<Segment>,
}

/// Twists φ so that its f-torsion of largest valuation becomes units.
pub fn stable_normalize(phi: &DrinfeldModule<Lfe>, f: &Poly<Gf>) -> Result<StableForm> {
    let phi_f = phi.image(f);
    if phi_f.coeff(0).valuation() != Some(0) {
        return Err(Error::CharacteristicDividesLevel);
    }
    let slopes = newton_slopes(&phi_f)?;
    let k = -integral_slopes(&slopes)?[0];
    let twisted = phi.twist(&x_pow(phi.theta(), -k))?;
    let mut rank = 0;
    for (i, c) in twisted.phi_t().coeffs().iter().enumerate() {
        match (c.valuation(), c.prec()) {
            (Some(v), _) if v < 0 => {
                return Err(Error::Internal(format!("coefficient {i} of the normal form has valuation {v}")));
            }
            (Some(0), _) => rank = i,
            (None, Some(p)) if p <= 0 => {
                return Err(Error::Precision(format!("coefficient {i} of the normal form is O(x^{p})")));
            }
            _ => {}
        }
    }
    if rank == 0 {
        return Err(Error::Internal("normal form reduces to a constant".into()));
    }
    Ok(StableForm { phi: twisted, k, reduction_rank: rank, slopes })
}

// ---- successive approximation ----

#[derive(Clone, Debug)]
pub struct Approximation {
    /// s = 1 + s_1 τ + ... + s_D τ^D with s_i ≡ 0 mod x, and φ' s = s ψ.
    pub s: SkewPoly<Lfe>,
    /// ψ_T = θ + cτ.
    pub psi: DrinfeldModule<Lfe>,
    /// τ^2..τ^{D+1} coefficients of s^{-1} φ'_T s vanish below x^achieved.
    pub achieved: i64,
    pub iterations: usize,
}

/// Solves φ'_T s = s ψ_T for a rank 2 module with reduction rank 1, by
/// iterating s_j = c^{-q^j}[s_{j+1}(θ − θ^{q^{j+1}}) + g s_j^q + Δ s_{j−1}^{q²}]
/// with c = g + s_1(θ − θ^q) and s_{D+1} = 0.
pub fn drinfeld_approx(phi: &DrinfeldModule<Lfe>, d: usize, n: i64) -> Result<Approximation> {
    let q = phi.q();
    let theta = phi.theta().clone();
    let zero = theta.zero_like();
    if phi.rank() == 1 {
        return Ok(Approximation { s: SkewPoly::one(&zero, q), psi: phi.clone(), achieved: n, iterations: 0 });
    }
    if phi.rank() != 2 {
        return Err(Error::Precondition("successive approximation needs rank 2".into()));
    }
    if d == 0 {
        return Err(Error::Config("τ-degree must be at least 1".into()));
    }
    let g = phi.phi_t().coeff(1);
    let delta = phi.phi_t().coeff(2);
    if g.valuation() != Some(0) || delta.valuation_bound().map_or(true, |v| v < 1) || theta.valuation_bound().map_or(false, |v| v < 0) {
        return Err(Error::Precondition("reduction rank is not 1: need θ integral, v(g) = 0 < v(Δ)".into()));
    }
    let dth: Vec<Lfe> = (0..=d + 1).map(|j| theta.clone() - theta.frob_n(q, j as u32)).collect();
    let cap: Vec<i64> = (0..=d + 1).map(|j| q_pow(q, j).map(|p| n.saturating_mul(p).saturating_add(n))).collect::<Result<_>>()?;
    let mut s = vec![zero.clone(); d + 2];
    s[0] = theta.one_like();
    let max_it = 64 + 8 * d + n.max(0) as usize;
    let mut iterations = 0;
    loop {
        if iterations == max_it {
            return Err(Error::Precision(format!("successive approximation did not settle in {max_it} steps")));
        }
        iterations += 1;
        let c = g.clone() + s[1].clone() * dth[1].clone();
        let cinv = c.inv().ok_or_else(|| Error::NotUnit("c".into()))?;
        let mut next = s.clone();
        for j in 1..=d {
            let rhs = s[j + 1].clone() * dth[j + 1].clone()
                + g.clone() * s[j].frob(q)
                + delta.clone() * s[j - 1].frob_n(q, 2);
            next[j] = (cinv.frob_n(q, j as u32) * rhs).truncate(cap[j]);
        }
        if next == s {
            break;
        }
        s = next;
    }
    for (j, sj) in s.iter().enumerate().take(d + 1).skip(1) {
        if sj.valuation_bound().map_or(false, |v| v < 1) {
            return Err(Error::Internal(format!("s_{j} is not divisible by x")));
        }
    }
    let sp = SkewPoly::new(s[..=d].to_vec(), q, &zero);
    let sinv = tau_series_invert(&sp, d + 1)?;
    let w = sinv.mul_trunc(&phi.phi_t().mul_trunc(&sp, d + 1), d + 1);
    let mut achieved = n;
    for i in 2..=d + 1 {
        achieved = achieved.min(w.coeff(i).valuation_bound().unwrap_or(n));
    }
    if achieved < n - DEFAULT_SLACK {
        return Err(Error::Precision(format!(
            "τ^{{≥2}} part of s^{{-1}}φs vanishes only below x^{achieved}; raise N or the τ-degree"
        )));
    }
    let psi = DrinfeldModule::new(theta.clone(), vec![theta, w.coeff(1)], q)?;
    Ok(Approximation { s: sp, psi, achieved, iterations })
}

// ---- local torsion ----

/// v(P(x)) lower bound for |x − root| ≤ |π^m|: min_i v(a_i) + q^i m.
fn root_bound(vb: &[(i64, i64)], m: i64) -> i64 {
    vb.iter().map(|&(qi, v)| v.saturating_add(qi.saturating_mul(m))).min().unwrap_or(i64::MAX)
}

fn newton_step_root(p: &SkewPoly<Lfe>, a0inv: &Lfe, mut x: Lfe, n: i64) -> Option<Lfe> {
    for _ in 0..(16 + 2 * n.max(0)) {
        let r = p.eval(&x);
        match r.valuation() {
            None => {
                let prec = r.prec().unwrap_or(n).min(n);
                return Some(x.truncate(prec));
            }
            // near a root P(x) = P(x − root) has valuation >= 1
            Some(v) if v < 1 => return None,
            Some(_) => x = (x - r * a0inv.clone()).truncate(n),
        }
    }
    None
}

/// The distinct f-torsion points of φ in F((x)) that digit search and
/// Newton iteration can separate at precision n. φ must be in normal form
/// (φ_f integral with unit constant term). The zero point comes first.
pub fn local_torsion_points(phi: &DrinfeldModule<Lfe>, f: &Poly<Gf>, n: i64) -> Result<Vec<Lfe>> {
    let p = phi.image(f);
    let a0 = p.coeff(0);
    if a0.valuation() != Some(0) {
        return Err(Error::CharacteristicDividesLevel);
    }
    let q = p.q();
    let mut vb = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.valuation().map_or(false, |v| v < 0) {
            return Err(Error::Precondition("φ_f has non-integral coefficients; normalize first".into()));
        }
        if let Some(v) = c.valuation_bound() {
            vb.push((q_pow(q, i)?, v));
        }
    }
    let slopes = integral_slopes(&newton_slopes(&p)?)?;
    let ctx = a0.lead().unwrap().ctx().clone();
    let a0inv = a0.inv().unwrap();
    let keep = |x: &Lfe, j: i64| p.eval(x).valuation().map_or(true, |v| v >= root_bound(&vb, j + 1));
    let mut roots = vec![Series::exact(0, vec![], &Gf::zero(&ctx))];
    for w in slopes.iter().map(|s| -s) {
        let mut cands: Vec<Lfe> = Gf::elements(&ctx)
            .filter(|d| !d.is_zero())
            .map(|d| Series::monomial(d, w))
            .filter(|x| keep(x, w))
            .collect();
        for j in (w + 1)..=0 {
            let mut next = Vec::new();
            for x in &cands {
                for d in Gf::elements(&ctx) {
                    let y = x.clone() + Series::monomial(d, j);
                    if keep(&y, j) {
                        next.push(y);
                    }
                }
            }
            if next.len() > MAX_CANDIDATES {
                return Err(Error::Precision("digit search does not narrow; raise N".into()));
            }
            cands = next;
        }
        for x in cands {
            if let Some(r) = newton_step_root(&p, &a0inv, x, n) {
                if r.valuation() == Some(w) && !roots.iter().any(|y| (y.clone() - r.clone()).valuation().is_none()) {
                    roots.push(r);
                }
            }
        }
    }
    Ok(roots)
}

/// All q^{r·deg f} torsion points, or an error saying why not.
pub fn local_torsion(phi: &DrinfeldModule<Lfe>, f: &Poly<Gf>, n: i64) -> Result<Vec<Lfe>> {
    let roots = local_torsion_points(phi, f, n)?;
    let expected = q_pow(phi.q(), phi.rank() * f.degree().unwrap_or(0))? as usize;
    if roots.len() != expected {
        if roots.iter().skip(1).any(|r| r.prec().map_or(false, |p| p < 1)) {
            return Err(Error::Precision(format!(
                "found {} of {expected} torsion points; some are known only modulo x^0",
                roots.len()
            )));
        }
        return Err(Error::Precondition(format!(
            "f-torsion is not rational over F((x)): found {} of {expected}",
            roots.len()
        )));
    }
    Ok(roots)
}

// ---- lattice ----

#[derive(Clone, Debug)]
pub struct RecoveredLattice {
    pub ell: Lfe,
    /// The torsion point u used and z = s^{-1}(u).
    pub u: Lfe,
    pub z: Lfe,
    /// s(ℓ) vanishes below x^achieved.
    pub achieved: i64,
}

/// ℓ = ψ_f(s^{-1}(u)) for a torsion point u of negative valuation: `hint`
/// if given, else the first one found by [`local_torsion_points`].
pub fn lattice_recover(
    phi: &DrinfeldModule<Lfe>,
    approx: &Approximation,
    f: &Poly<Gf>,
    n: i64,
    hint: Option<&Lfe>,
) -> Result<RecoveredLattice> {
    let u = match hint {
        Some(u) => {
            if !u.valuation().map_or(false, |v| v < 0) {
                return Err(Error::NoLattice("hint point is integral".into()));
            }
            if !phi.image(f).eval(u).is_zero() {
                return Err(Error::NotTorsion);
            }
            u.clone()
        }
        None => local_torsion_points(phi, f, n)?
            .into_iter()
            .find(|p| p.valuation().map_or(false, |v| v < 0))
            .ok_or_else(|| Error::NoLattice("every f-torsion point is integral; the reduction is good".into()))?,
    };
    let d = approx.s.degree().unwrap_or(0);
    let z = tau_series_invert(&approx.s, d)?.eval(&u);
    let ell = approx.psi.image(f).eval(&z);
    if !ell.valuation().map_or(false, |v| v < 0) {
        return Err(Error::NoLattice("ψ_f(s^{-1}(u)) is integral".into()));
    }
    let se = approx.s.eval(&ell);
    let achieved = se.valuation().or(se.prec()).unwrap_or(n).min(n);
    Ok(RecoveredLattice { ell, u, z, achieved })
}

// ---- triples ----

#[derive(Clone, Debug)]
pub struct Triple {
    pub psi: DrinfeldModule<Lfe>,
    /// μ(1), a generator of ψ[f].
    pub mu: Lfe,
    pub ell: Lfe,
    pub k: i64,
    pub s: SkewPoly<Lfe>,
    /// a_j with ψ_f(s^{-1}(λ(e_j))) = ψ_{a_j}(ℓ), deg a_j < deg f.
    pub lattice_coords: [Poly<Gf>; 2],
    /// ψ, μ and ℓ are known below x^achieved.
    pub achieved: i64,
    /// s(ℓ) vanishes below x^lattice_achieved.
    pub lattice_achieved: i64,
}

/// (φ, λ) with stable reduction of rank 1 -> (ψ, μ, ℓ).
///
/// With z_j = s^{-1}(λ(e_j)) and ψ_f(z_j) = a_j ℓ, μ(1) = ψ_{a_1}(z_2) −
/// ψ_{a_2}(z_1). This is alternating and A-bilinear in the λ(e_j) and does
/// not depend on the lift z_j modulo Λ, so (φ, λ∘σ) gives ψ_{det σ}(μ(1)).
/// ℓ is taken from the first basis point of negative valuation, which fixes
/// the F_q* ambiguity of the lattice generator.
pub fn triple_extract(phi: &DrinfeldModule<Lfe>, level: &LevelStructure<Lfe>, n: i64) -> Result<Triple> {
    let f = &level.f;
    if level.rank() != 2 {
        return Err(Error::Precondition("triple extraction needs a rank 2 level".into()));
    }
    let st = stable_normalize(phi, f)?;
    if st.reduction_rank != 1 {
        return Err(Error::Precondition(format!("reduction rank is {}, need 1", st.reduction_rank)));
    }
    let xi = x_pow(phi.theta(), -st.k);
    let basis: Vec<Lfe> = level.basis.iter().map(|b| b.clone() * xi.clone()).collect();
    let q = phi.q();
    let qf = level.resid.size() as i64;
    let vl = basis.iter().filter_map(|b| b.valuation()).min().unwrap_or(0).min(0).saturating_mul(qf);
    let mut d = 1;
    let approx = loop {
        let a = drinfeld_approx(&st.phi, d, n)?;
        // the last term must be negligible at the most negative point evaluated
        let top = a.s.coeff(d).valuation_bound().unwrap_or(i64::MAX);
        if top.saturating_add(q_pow(q, d)?.saturating_mul(vl)) >= n {
            break a;
        }
        if d == MAX_TAU_DEGREE {
            return Err(Error::Precision(format!("τ-degree {d} does not reach x^{n}")));
        }
        d += 1;
    };
    let hint = basis
        .iter()
        .find(|b| b.valuation().map_or(false, |v| v < 0))
        .ok_or_else(|| Error::NoLattice("both basis points are integral".into()))?;
    let lat = lattice_recover(&st.phi, &approx, f, n, Some(hint))?;
    let sinv = tau_series_invert(&approx.s, d)?;
    let psi_f = approx.psi.image(f);
    let lattice_pts: Vec<(Poly<Gf>, Lfe)> = (0..level.resid.size())
        .map(|i| {
            let a = level.resid.poly_of(i);
            let p = approx.psi.image(&a).eval(&lat.ell);
            (a, p)
        })
        .collect();
    let mut z = Vec::new();
    let mut coords = Vec::new();
    for b in &basis {
        let zb = sinv.eval(b);
        let y = psi_f.eval(&zb);
        // distinct lattice points differ at a negative exponent
        let hits: Vec<&Poly<Gf>> = lattice_pts
            .iter()
            .filter(|(_, p)| (p.clone() - y.clone()).valuation().map_or(true, |v| v >= 0))
            .map(|(a, _)| a)
            .collect();
        match hits.as_slice() {
            [a] => coords.push((*a).clone()),
            [] => return Err(Error::Internal("ψ_f(s^{-1}(λ(e))) is not a lattice point".into())),
            _ => return Err(Error::Precision("lattice coordinate is not determined".into())),
        }
        z.push(zb);
    }
    let mu = approx.psi.image(&coords[0]).eval(&z[1]) - approx.psi.image(&coords[1]).eval(&z[0]);
    if mu.valuation_bound().map_or(false, |v| v < 0) {
        return Err(Error::Internal("μ(1) is not integral".into()));
    }
    LevelStructure::new(&approx.psi, f, vec![mu.clone()])?;
    let mut achieved = approx.achieved;
    for x in approx.psi.phi_t().coeffs().iter().chain([&mu, &lat.ell]) {
        if let Some(p) = x.prec() {
            achieved = achieved.min(p);
        }
    }
    Ok(Triple {
        psi: approx.psi,
        mu,
        ell: lat.ell,
        k: st.k,
        s: approx.s,
        lattice_coords: [coords[0].clone(), coords[1].clone()],
        achieved,
        lattice_achieved: lat.achieved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gf::{FieldTower, GfCtx};
    use crate::tate::{tate_for, SpecialTate, Specialization};
    use crate::weil::compose_level;
    use std::sync::Arc;

    fn f9() -> Arc<GfCtx> {
        FieldTower::new(3, 2, 1).unwrap().base
    }

    fn c(k: &Arc<GfCtx>, v: i64) -> Lfe {
        Series::scalar(Gf::from_int(k, v))
    }

    fn xk(k: &Arc<GfCtx>, e: i64) -> Lfe {
        Series::monomial(Gf::one(k), e)
    }

    fn rank2(g: Lfe, d: Lfe) -> DrinfeldModule<Lfe> {
        let k = g.zero_coeff().ctx().clone();
        DrinfeldModule::new(c(&k, 1), vec![c(&k, 1), g, d], 3).unwrap()
    }

    fn t_poly() -> Poly<Gf> {
        Poly::from_indices(&FieldTower::new(3, 1, 1).unwrap().base, &[0, 1])
    }

    fn special(n: i64) -> (SpecialTate, Specialization) {
        let tx = tate_for(&t_poly(), n).unwrap();
        let sp = Specialization::standard(tx.u()).unwrap();
        (sp.tate_data(&tx).unwrap(), sp)
    }

    #[test]
    fn slopes_examples() {
        let k = f9();
        let phi = rank2(c(&k, -1), xk(&k, 6));
        let s = newton_slopes(phi.phi_t()).unwrap();
        assert_eq!(s, vec![Segment { rise: 0, run: 2 }, Segment { rise: 6, run: 6 }]);
        let unit = rank2(c(&k, 1), c(&k, 1));
        assert_eq!(newton_slopes(unit.phi_t()).unwrap(), vec![Segment { rise: 0, run: 8 }]);
        let r1 = DrinfeldModule::new(c(&k, 1), vec![c(&k, 1), c(&k, 2)], 3).unwrap();
        assert_eq!(newton_slopes(r1.phi_t()).unwrap(), vec![Segment { rise: 0, run: 2 }]);
        // O(x) at q − 1 = 2 is below the hull height 1.5 there
        let fuzzy = rank2(Series::big_o(1, &Gf::zero(&k)) + c(&k, 0), xk(&k, 6));
        assert!(matches!(newton_slopes(fuzzy.phi_t()), Err(Error::Precision(_))));
    }

    #[test]
    fn normal_form() {
        let k = f9();
        let good = stable_normalize(&rank2(c(&k, 1), c(&k, 1)), &t_poly()).unwrap();
        assert_eq!((good.k, good.reduction_rank), (0, 2));
        let phi = rank2(c(&k, -1), xk(&k, 6));
        let st = stable_normalize(&phi, &t_poly()).unwrap();
        assert_eq!((st.k, st.reduction_rank), (0, 1));
        // conjugating by x^{±1} changes k and nothing else
        for e in [-1, 1, 2] {
            let tw = phi.twist(&xk(&k, e)).unwrap();
            let st2 = stable_normalize(&tw, &t_poly()).unwrap();
            assert_eq!(st2.phi, st.phi);
            assert_eq!(st2.k, st.k + e);
        }
        let bad = rank2(c(&k, 1), xk(&k, 1));
        assert!(matches!(stable_normalize(&bad, &t_poly()), Err(Error::NonIntegralSlope(_))));
    }

    #[test]
    fn tau_inverse_two_terms() {
        let k = f9();
        let cc = xk(&k, 1) + c(&k, 0);
        let z = cc.zero_like();
        let s = SkewPoly::new(vec![z.one_like(), cc.clone()], 3, &z);
        let t = tau_series_invert(&s, 3).unwrap();
        assert_eq!(t.coeff(1), -cc.clone());
        assert_eq!(t.coeff(2), cc.pow(4));
        assert_eq!(tau_series_invert(&tau_series_invert(&s, 6).unwrap(), 6).unwrap().truncate(3), s);
        let id = s.mul_trunc(&t, 3);
        assert_eq!(id, SkewPoly::one(&z, 3));
    }

    #[test]
    fn approximation_basics() {
        let k = f9();
        let r1 = DrinfeldModule::new(c(&k, 1), vec![c(&k, 1), c(&k, 2)], 3).unwrap();
        let a = drinfeld_approx(&r1, 3, 9).unwrap();
        assert_eq!(a.s, SkewPoly::one(&c(&k, 0), 3));
        let phi = rank2(c(&k, -1), xk(&k, 6));
        let a = drinfeld_approx(&phi, 2, 12).unwrap();
        assert_eq!(a.achieved, 12);
        assert!(a.s.coeffs().iter().skip(1).all(|v| v.valuation_bound().unwrap() >= 1));
        assert_eq!(a.s.coeff(1).valuation(), Some(6));
        assert!(matches!(drinfeld_approx(&rank2(c(&k, 1), c(&k, 1)), 2, 9), Err(Error::Precondition(_))));
    }

    #[test]
    fn tate_round_trip() {
        let (sp, _) = special(9);
        let st = stable_normalize(&sp.phi, &t_poly()).unwrap();
        assert_eq!((st.k, st.reduction_rank), (0, 1));
        let a = drinfeld_approx(&st.phi, 2, 10).unwrap();
        for i in 1..=2 {
            assert!(a.s.coeff(i).agreement(&sp.e.coeff(i), 10) >= 5, "s_{i}");
        }
        let lat = lattice_recover(&st.phi, &a, &t_poly(), 10, Some(&sp.level.basis[0])).unwrap();
        assert!(lat.ell.agreement(&sp.ell, 10) >= 5);
        let tr = triple_extract(&sp.phi, &sp.level, 10).unwrap();
        assert!(tr.achieved >= 5);
        assert!(tr.mu.agreement(&c(tr.mu.zero_coeff().ctx(), 1), 10) >= 5);
        assert!(tr.psi.phi_t().coeff(1).agreement(&sp.psi.phi_t().coeff(1), 10) >= 5);
    }

    #[test]
    fn triple_equivariance() {
        let (sp, _) = special(9);
        let base = triple_extract(&sp.phi, &sp.level, 10).unwrap();
        let r = &sp.level.resid;
        let k = base.mu.zero_coeff().ctx().clone();
        for g in crate::cusps::gl2_enum(r, crate::exec::Execution::Sequential).unwrap() {
            let lv = compose_level(&sp.phi, &sp.level, g).unwrap();
            let tr = triple_extract(&sp.phi, &lv, 10).unwrap();
            let want = base.psi.image(&r.poly_of(crate::cusps::mat_det(r, &g))).eval(&base.mu);
            let ok = (1..3).any(|u| tr.mu.agreement(&(want.clone() * c(&k, u)), 10) >= 5);
            assert!(ok, "σ = {g:?}");
        }
    }

    #[test]
    fn torsion_search() {
        let k = f9();
        // X − X^3 + x^6 X^9 has integral torsion only over F((x)) itself
        let phi = rank2(c(&k, -1), xk(&k, 6));
        let pts = local_torsion_points(&phi, &t_poly(), 12).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(matches!(local_torsion(&phi, &t_poly(), 12), Err(Error::Precondition(_))));
        let good = rank2(c(&k, 0), c(&k, 1));
        let a = drinfeld_approx(&good, 2, 9);
        assert!(a.is_err());
        let (sp, _) = special(30);
        let st = stable_normalize(&sp.phi, &t_poly()).unwrap();
        let all = local_torsion(&st.phi, &t_poly(), 30).unwrap();
        assert_eq!(all.len(), 9);
        assert_eq!(all.iter().filter(|p| p.valuation() == Some(-1)).count(), 6);
    }
}
