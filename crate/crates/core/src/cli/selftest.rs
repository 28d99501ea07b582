//! Seeded invariant suites run by `dforge selftest`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FieldTower, Gf, GfCtx, Poly, Ring, Series};
use crate::drinfeld::{dm_torsion, DrinfeldModule, DEFAULT_TORSION_SEARCH};
use crate::skew::SkewPoly;

use super::json::{line, CensusDoc, Int, SeriesDoc, SuiteDoc};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub samples: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn failed(&self) -> usize {
        self.samples - self.passed
    }

    pub fn doc(&self, seed: u64) -> SuiteDoc {
        SuiteDoc {
            command: "selftest".into(),
            suite: self.name.into(),
            seed: Int(seed),
            samples: Int(self.samples),
            passed: Int(self.passed),
            failed: Int(self.failed()),
            first_failure: self.first_failure.clone(),
        }
    }
}

/// Shared suite context. `fault` swaps the skew product for a deliberately
/// wrong one, to show the suites catch a broken build.
pub struct Ctx {
    pub k: Arc<GfCtx>,
    pub fault: bool,
}

type Check = fn(&mut ChaCha8Rng, &Ctx) -> Result<(), String>;

/// (name, default samples, check)
pub const SUITES: [(&str, usize, Check); 5] = [
    ("skew_ring_axioms", 1000, skew_axioms),
    ("divmod_round_trip", 500, divmod),
    ("torsion_counts", 24, torsion_count),
    ("series_inversion", 500, series_inversion),
    ("serialization_round_trip", 500, serialization),
];

fn run_one(name: &'static str, samples: usize, check: Check, seed: u64, ctx: &Ctx) -> SuiteResult {
    // each suite gets its own stream so that suites do not shift each other
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fxhash(name));
    let mut passed = 0;
    let mut first_failure = None;
    for i in 0..samples {
        match check(&mut rng, ctx) {
            Ok(()) => passed += 1,
            Err(m) => {
                first_failure.get_or_insert_with(|| format!("sample {i}: {m}"));
            }
        }
    }
    SuiteResult { name, samples, passed, first_failure }
}

fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs every suite over F_9 with q = 3. `samples` overrides the per-suite
/// defaults.
pub fn run_all(seed: u64, samples: Option<usize>) -> Vec<SuiteResult> {
    run_suites(seed, samples, false)
}

pub fn run_suites(seed: u64, samples: Option<usize>, fault: bool) -> Vec<SuiteResult> {
    let ctx = Ctx { k: FieldTower::with_bound(3, 1, 2, 9).expect("F_9").ext, fault };
    SUITES.iter().map(|&(name, n, check)| run_one(name, samples.unwrap_or(n), check, seed, &ctx)).collect()
}

fn product(ctx: &Ctx, x: &SkewPoly<Gf>, y: &SkewPoly<Gf>) -> Result<SkewPoly<Gf>, String> {
    let r = if ctx.fault { y.try_mul(x) } else { x.try_mul(y) };
    r.map_err(|e| e.to_string())
}

// ---- generators ----

fn gf(rng: &mut ChaCha8Rng, k: &Arc<GfCtx>) -> Gf {
    Gf::from_index(k, rng.gen_range(0..k.size() as u32))
}

fn unit(rng: &mut ChaCha8Rng, k: &Arc<GfCtx>) -> Gf {
    Gf::from_index(k, rng.gen_range(1..k.size() as u32))
}

fn skew(rng: &mut ChaCha8Rng, k: &Arc<GfCtx>, max_deg: usize) -> SkewPoly<Gf> {
    let d = rng.gen_range(0..=max_deg);
    let c = (0..=d).map(|_| gf(rng, k)).collect();
    SkewPoly::new(c, 3, &Gf::zero(k))
}

fn series(rng: &mut ChaCha8Rng, k: &Arc<GfCtx>) -> Series<Gf> {
    let low = rng.gen_range(-3..4i64);
    let len = rng.gen_range(1..8usize);
    let mut c: Vec<Gf> = (0..len).map(|_| gf(rng, k)).collect();
    c[0] = unit(rng, k);
    // only monomials are exact and invertible
    let prec = if len == 1 && rng.gen_bool(0.3) { None } else { Some(low + rng.gen_range(1..10i64)) };
    Series::new(low, c, prec, &Gf::zero(k))
}

// ---- checks ----

fn skew_axioms(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(), String> {
    let k = &ctx.k;
    let (a, b, c) = (skew(rng, k, 4), skew(rng, k, 4), skew(rng, k, 4));
    let m = |x: &SkewPoly<Gf>, y: &SkewPoly<Gf>| product(ctx, x, y);
    if m(&m(&a, &b)?, &c)? != m(&a, &m(&b, &c)?)? {
        return Err(format!("(ab)c != a(bc) for {a:?} {b:?} {c:?}"));
    }
    if m(&a, &(b.clone() + c.clone()))? != m(&a, &b)? + m(&a, &c)? {
        return Err("left distributivity".into());
    }
    if m(&(a.clone() + b.clone()), &c)? != m(&a, &c)? + m(&b, &c)? {
        return Err("right distributivity".into());
    }
    let x = gf(rng, k);
    let tau = SkewPoly::tau(&Gf::zero(k), 3);
    if m(&tau, &SkewPoly::constant(x.clone(), 3))? != SkewPoly::monomial(x.pow(3), 1, 3) {
        return Err(format!("τ·{x:?} != {x:?}^3·τ"));
    }
    let one = SkewPoly::one(&Gf::zero(k), 3);
    if m(&a, &one)? != a || m(&one, &a)? != a {
        return Err("identity".into());
    }
    Ok(())
}

fn divmod(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(), String> {
    let k = &ctx.k;
    let a = skew(rng, k, 6);
    let mut b = skew(rng, k, 3);
    if b.is_zero() {
        b = SkewPoly::constant(unit(rng, k), 3);
    }
    let (quot, rem) = a.right_divmod(&b).map_err(|e| e.to_string())?;
    if rem.degree().map_or(false, |d| Some(d) >= b.degree()) {
        return Err("remainder degree".into());
    }
    let back = product(ctx, &quot, &b)? + rem;
    if back != a {
        return Err(format!("quot·b + rem != a for a = {a:?}, b = {b:?}"));
    }
    Ok(())
}

/// |φ[f]| = q^{r deg f}, f coprime to the characteristic. Over F_3 the
/// torsion field has degree at most 8 (the largest element order in
/// GL_2(F_3) and in (A/f)^* for deg f = 2); over F_9 only rank 1 and
/// deg f = 1 stay inside the default field-size bound.
fn torsion_count(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(), String> {
    let k9 = &ctx.k;
    let k3 = k9.base().cloned().ok_or("F_9 built without its base field")?;
    let (k, r, deg) = if rng.gen_bool(0.25) {
        (k9.clone(), 1, 1)
    } else {
        let r = rng.gen_range(1..=2usize);
        (k3.clone(), r, if r == 1 { rng.gen_range(1..=2usize) } else { 1 })
    };
    let mut fi: Vec<u32> = (0..deg).map(|_| rng.gen_range(0..3)).collect();
    fi.push(1);
    let f = Poly::from_indices(&k3, &fi);
    let theta = gf(rng, &k);
    let mut c = vec![theta.clone()];
    c.extend((1..r).map(|_| gf(rng, &k)));
    c.push(unit(rng, &k));
    let phi = DrinfeldModule::new(theta, c, 3).map_err(|e| e.to_string())?;
    if !phi.away_from_char(&f) {
        return Ok(());
    }
    let t = dm_torsion(&phi, &f, DEFAULT_TORSION_SEARCH).map_err(|e| e.to_string())?;
    let want = 3usize.pow((r * deg) as u32);
    if t.points.len() != want {
        return Err(format!("{} torsion points, want {want}", t.points.len()));
    }
    Ok(())
}

fn series_inversion(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(), String> {
    let k = &ctx.k;
    let s = series(rng, k);
    let inv = s.invert().map_err(|e| e.to_string())?;
    let prod = s.clone() * inv.clone();
    let one = Series::scalar(Gf::one(k));
    // relative precision is preserved by inversion
    let rel = s.prec().map_or(12, |p| p - s.low());
    if !prod.eq_to(&one, rel) {
        return Err(format!("s·s^-1 != 1 below x^{rel} for {s:?}"));
    }
    if inv.low() != -s.low() {
        return Err("valuation of the inverse".into());
    }
    Ok(())
}

fn serialization(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(), String> {
    let k = &ctx.k;
    let s = series(rng, k);
    let doc = SeriesDoc::encode(&s);
    let text = line(&doc);
    let back: SeriesDoc = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if back != doc || line(&back) != text {
        return Err(format!("document round trip: {text}"));
    }
    if back.decode(k).map_err(|e| e.to_string())? != s {
        return Err(format!("series round trip: {text}"));
    }
    let c = CensusDoc {
        command: "census".into(),
        q: Int(rng.gen()),
        f: (0..rng.gen_range(2..5)).map(|_| Int(rng.gen())).collect(),
        h: Int(rng.gen()),
        gl2_order: Int(rng.gen()),
        sl2_order: Int(rng.gen()),
        sigma_order: Int(rng.gen()),
        n_order: Int(rng.gen()),
        h_order: Int(rng.gen()),
        units: Int(rng.gen()),
        cusp_count: Int(rng.gen()),
        component_count: Int(rng.gen()),
        geometric_cusps: Int(rng.gen()),
        x0_cusp_count: rng.gen_bool(0.5).then(|| Int(rng.gen())),
        formula_only: rng.gen(),
    };
    let text = line(&c);
    let back: CensusDoc = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if back != c || line(&back) != text {
        return Err(format!("census round trip: {text}"));
    }
    Ok(())
}

pub fn report(results: &[SuiteResult], seed: u64) -> Vec<String> {
    results.iter().map(|r| line(&r.doc(seed))).collect()
}
