//! census, tate and reduce.

use crate::algebra::gf::FieldTower;
use crate::algebra::{Gf, Poly, Series};
use crate::cusps::census;
use crate::drinfeld::{DrinfeldModule, LevelStructure};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::reduction::{drinfeld_approx, lattice_recover, stable_normalize, triple_extract, LocalFieldElement};
use crate::tate::{j_expansion, tate_for, Specialization};

use super::config::{split_prime_power, JobConfig};
use super::json::*;

pub fn cmd_census(cfg: &JobConfig, h: u64, exec: Execution) -> Result<CensusDoc> {
    if h == 0 {
        return Err(Error::Config("h must be positive".into()));
    }
    let c = census(&cfg.f_poly()?, h, exec)?;
    Ok(CensusDoc {
        command: "census".into(),
        q: Int(c.q),
        f: ints(&c.f),
        h: Int(c.h),
        gl2_order: Int(c.orders.gl2),
        sl2_order: Int(c.orders.sl2),
        sigma_order: Int(c.orders.sigma),
        n_order: Int(c.orders.n),
        h_order: Int(c.orders.h),
        units: Int(c.units),
        cusp_count: Int(c.cusp_count),
        component_count: Int(c.component_count),
        geometric_cusps: Int(c.geometric_cusps),
        x0_cusp_count: (!c.formula_only).then_some(Int(c.x0_cusp_count)),
        formula_only: c.formula_only,
    })
}

/// The Tate document, plus the specialized module as a `reduce` input.
pub fn cmd_tate(cfg: &JobConfig) -> Result<(TateDoc, ReduceInput)> {
    let qd = cfg.q().checked_pow(cfg.deg_f() as u32).unwrap_or(u64::MAX);
    let n = cfg.n;
    if (n as u64) < qd {
        return Err(Error::Precision(format!("N = {n} is below q^deg f = {qd}; rerun with --N {qd} or more")));
    }
    let f = cfg.f_poly()?;
    let tx = tate_for(&f, n).map_err(|e| match e {
        Error::Precision(m) => Error::Precision(format!("{m}; rerun with a larger --N (tried {n})")),
        other => other,
    })?;
    let u = tx.u();
    let a = Poly::x(&Gf::zero(&u.fq));
    let j = j_expansion(&tx, &a)?;
    let doc = TateDoc {
        command: "tate".into(),
        q: Int(cfg.q()),
        f: ints(&cfg.f),
        n: Int(n),
        achieved: Int(tx.achieved),
        psi_tau: encode_kprime(u, &u.psi.phi_t().coeff(1))?,
        g: KSeriesDoc::encode(u, &tx.g())?,
        delta: KSeriesDoc::encode(u, &tx.delta())?,
        jinv: JinvDoc { a: ints(&a.indices()), k: Int(j.k), alpha0: encode_kprime(u, &j.alpha.coeff(0))? },
        levels: LevelsDoc {
            e10: KSeriesDoc::encode(u, &tx.level.basis[0])?,
            e01: KSeriesDoc::encode(u, &tx.level.basis[1])?,
        },
    };
    let sp = Specialization::standard(u)?;
    let st = sp.tate_data(&tx)?;
    let m = sp.t.ctx().degree() / u.fq.degree();
    let input = ReduceInput {
        p: Int(cfg.p),
        e: Int(cfg.e),
        m: Int(m),
        f: ints(&cfg.f),
        n: Int(tx.achieved),
        coeffs: st.phi.phi_t().coeffs().iter().map(SeriesDoc::encode).collect(),
        level: Some(st.level.basis.iter().map(SeriesDoc::encode).collect()),
    };
    Ok((doc, input))
}

/// Parses and checks a `reduce` input document.
pub fn load_module(
    input: &ReduceInput,
    bound: u64,
) -> Result<(DrinfeldModule<LocalFieldElement>, Poly<Gf>, Option<Vec<LocalFieldElement>>)> {
    let (p, e) = (input.p.0, input.e.0);
    if split_prime_power(p).map(|(_, e)| e) != Ok(1) {
        return Err(Error::Config(format!("p = {p} is not prime")));
    }
    if e == 0 {
        return Err(Error::Config("e must be >= 1".into()));
    }
    let tower = FieldTower::with_bound(p, e, input.m.0, bound)?;
    let q = tower.q();
    let fidx = unints(&input.f);
    if fidx.len() < 2 || fidx.last() != Some(&1) || fidx.iter().any(|&i| i as u64 >= q) {
        return Err(Error::Config("f must be monic of degree >= 1 over F_q".into()));
    }
    let f = Poly::from_indices(&tower.base, &fidx);
    if input.coeffs.len() < 2 {
        return Err(Error::Config("φ_T needs θ and at least one τ-coefficient".into()));
    }
    let c = input.coeffs.iter().map(|s| s.decode(&tower.ext)).collect::<Result<Vec<_>>>()?;
    let top = c.last().unwrap();
    if top.valuation().is_none() && !top.is_exact() {
        return Err(Error::Precision(format!(
            "leading coefficient is O(x^{}); the input is truncated too short",
            top.prec().unwrap_or(0)
        )));
    }
    let theta = c[0].clone();
    let phi = DrinfeldModule::new(theta, c, q)?;
    let level = match &input.level {
        None => None,
        Some(v) => Some(v.iter().map(|s| s.decode(&tower.ext)).collect::<Result<Vec<_>>>()?),
    };
    Ok((phi, f, level))
}

fn series_docs(v: &[Series<Gf>]) -> Vec<SeriesDoc> {
    v.iter().map(SeriesDoc::encode).collect()
}

pub fn cmd_reduce(input: &ReduceInput, n_override: Option<i64>, d: usize, bound: u64) -> Result<ReduceDoc> {
    let (phi, f, level) = load_module(input, bound)?;
    let n = n_override.unwrap_or(input.n.0);
    if n < 1 {
        return Err(Error::Precision(format!("N = {n} must be positive")));
    }
    let st = stable_normalize(&phi, &f)?;
    let slopes = st.slopes.iter().map(|s| SlopeDoc { rise: Int(s.rise), run: Int(s.run) }).collect();
    let mut doc = ReduceDoc {
        command: "reduce".into(),
        status: String::new(),
        stable_rank: Int(st.reduction_rank),
        k: Int(st.k),
        slopes,
        psi: vec![],
        lattice_generator: None,
        mu: None,
        achieved_precision: Int(n),
        lattice_check: None,
    };
    match st.reduction_rank {
        2 => {
            let red: Vec<_> = st.phi.phi_t().coeffs().iter().map(|c| c.truncate(1)).collect();
            doc.status = "good reduction (rank 2)".into();
            doc.psi = series_docs(&red);
            let known = st.phi.phi_t().coeffs().iter().filter_map(|c| c.prec()).min().unwrap_or(n);
            // the reduction itself lives mod x
            doc.achieved_precision = Int(known.min(n).min(1));
        }
        1 => {
            doc.status = "stable reduction of rank 1".into();
            match level {
                Some(basis) => {
                    let lv = LevelStructure::new(&phi, &f, basis)?;
                    let tr = triple_extract(&phi, &lv, n)?;
                    doc.psi = series_docs(tr.psi.phi_t().coeffs());
                    doc.lattice_generator = Some(SeriesDoc::encode(&tr.ell));
                    doc.mu = Some(SeriesDoc::encode(&tr.mu));
                    doc.achieved_precision = Int(tr.achieved);
                    doc.lattice_check = Some(Int(tr.lattice_achieved));
                }
                None => {
                    let a = drinfeld_approx(&st.phi, d, n)?;
                    let lat = lattice_recover(&st.phi, &a, &f, n, None)?;
                    doc.psi = series_docs(a.psi.phi_t().coeffs());
                    doc.lattice_generator = Some(SeriesDoc::encode(&lat.ell));
                    doc.achieved_precision = Int(a.achieved);
                    doc.lattice_check = Some(Int(lat.achieved));
                }
            }
        }
        r => return Err(Error::Precondition(format!("reduction rank {r} is not 1 or 2"))),
    }
    Ok(doc)
}
