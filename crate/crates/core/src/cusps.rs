//! 2×2 matrix groups over A/fA, their subgroups N, H, Σ, Sl2, coset
//! representatives, double cosets and the cusp and component census.
//!
//! A matrix is stored row-major as residue indices `[a, b, c, d]` for
//! [[a, b], [c, d]]. All enumeration is exhaustive.

use crate::algebra::gf::Gf;
use crate::algebra::poly::Poly;
use crate::algebra::residue::ResidueRing;
use crate::error::{Error, Result};
use crate::exec::Execution;

pub type Mat = [u32; 4];

/// Largest Q = |A/fA| handled by full enumeration.
pub const MAX_ENUM_Q: u32 = 81;

/// Largest Q for which [`gl2_enum`] materializes the whole group.
pub const MAX_LIST_Q: u32 = 27;

pub const IDENTITY: Mat = [1, 0, 0, 1];

pub fn mat_mul(r: &ResidueRing, x: &Mat, y: &Mat) -> Mat {
    [
        r.add(r.mul(x[0], y[0]), r.mul(x[1], y[2])),
        r.add(r.mul(x[0], y[1]), r.mul(x[1], y[3])),
        r.add(r.mul(x[2], y[0]), r.mul(x[3], y[2])),
        r.add(r.mul(x[2], y[1]), r.mul(x[3], y[3])),
    ]
}

pub fn mat_det(r: &ResidueRing, x: &Mat) -> u32 {
    r.sub(r.mul(x[0], x[3]), r.mul(x[1], x[2]))
}

pub fn mat_inv(r: &ResidueRing, x: &Mat) -> Option<Mat> {
    let di = r.inv(mat_det(r, x))?;
    Some([r.mul(x[3], di), r.mul(r.neg(x[1]), di), r.mul(r.neg(x[2]), di), r.mul(x[0], di)])
}

/// Index of a matrix in the encoding order a + b Q + c Q² + d Q³.
fn mat_index(q: u32, m: &Mat) -> usize {
    let q = q as usize;
    m[0] as usize + q * (m[1] as usize + q * (m[2] as usize + q * m[3] as usize))
}

fn mat_from_index(q: u32, mut i: usize) -> Mat {
    let q = q as usize;
    let mut m = [0u32; 4];
    for e in m.iter_mut() {
        *e = (i % q) as u32;
        i /= q;
    }
    m
}

fn check_enum(r: &ResidueRing) -> Result<()> {
    if r.size() > MAX_ENUM_Q {
        return Err(Error::SizeBound { size: r.size() as u64, bound: MAX_ENUM_Q as u64 });
    }
    Ok(())
}

pub fn in_n(r: &ResidueRing, m: &Mat) -> bool {
    m[2] == 0 && r.is_fq_star(m[0]) && r.is_unit(m[3])
}

pub fn in_h(r: &ResidueRing, m: &Mat) -> bool {
    m[2] == 0 && r.is_unit(m[0]) && r.is_unit(m[3])
}

/// All of Gl2(A/fA) in encoding order.
pub fn gl2_enum(r: &ResidueRing, exec: Execution) -> Result<Vec<Mat>> {
    if r.size() > MAX_LIST_Q {
        return Err(Error::SizeBound { size: r.size() as u64, bound: MAX_LIST_Q as u64 });
    }
    let q = r.size();
    let total = (q as usize).pow(4);
    let chunks = exec.map_range(q as usize, |d| {
        let base = d * (q as usize).pow(3);
        (base..base + (q as usize).pow(3))
            .map(|i| mat_from_index(q, i))
            .filter(|m| r.is_unit(mat_det(r, m)))
            .collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(total);
    for c in chunks {
        out.extend(c);
    }
    Ok(out)
}

/// Element lists of N and H.
pub fn n_elements(r: &ResidueRing) -> Vec<Mat> {
    let mut out = Vec::new();
    for a in 1..r.q() {
        for b in 0..r.size() {
            for d in r.units() {
                out.push([a, b, 0, d]);
            }
        }
    }
    out
}

pub fn h_elements(r: &ResidueRing) -> Vec<Mat> {
    let units = r.units();
    let mut out = Vec::new();
    for &a in &units {
        for b in 0..r.size() {
            for &d in &units {
                out.push([a, b, 0, d]);
            }
        }
    }
    out
}

/// Orders of the groups, by streaming over all Q^4 matrices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroupOrders {
    pub gl2: u64,
    pub sl2: u64,
    pub sigma: u64,
    pub n: u64,
    pub h: u64,
}

impl std::ops::Add for GroupOrders {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GroupOrders {
            gl2: self.gl2 + o.gl2,
            sl2: self.sl2 + o.sl2,
            sigma: self.sigma + o.sigma,
            n: self.n + o.n,
            h: self.h + o.h,
        }
    }
}

pub fn subgroups(r: &ResidueRing, exec: Execution) -> Result<GroupOrders> {
    check_enum(r)?;
    let q = r.size();
    let per = (q as usize).pow(3);
    Ok(exec.fold_range(
        q as usize,
        GroupOrders::default(),
        |d| {
            let mut o = GroupOrders::default();
            let base = d * per;
            for i in base..base + per {
                let m = mat_from_index(q, i);
                let det = mat_det(r, &m);
                if !r.is_unit(det) {
                    continue;
                }
                o.gl2 += 1;
                if det == 1 {
                    o.sl2 += 1;
                }
                if r.is_fq_star(det) {
                    o.sigma += 1;
                }
                if in_h(r, &m) {
                    o.h += 1;
                    if in_n(r, &m) {
                        o.n += 1;
                    }
                }
            }
            o
        },
        |a, b| a + b,
    ))
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Bitset(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

/// Representatives σ_1 = 1, σ_2, ... of the left cosets σN in Gl2, each of
/// determinant 1: the least unvisited matrix in encoding order, moved into
/// Sl2 by σ·diag(1, det^{-1}) (which stays in σN).
pub fn coset_reps(r: &ResidueRing, _exec: Execution) -> Vec<Mat> {
    let q = r.size();
    let total = (q as usize).pow(4);
    let n = n_elements(r);
    let mut seen = Bitset::new(total);
    let mut reps = Vec::new();
    let visit = |g: Mat, seen: &mut Bitset, reps: &mut Vec<Mat>| {
        let di = r.inv(mat_det(r, &g)).unwrap();
        let rep = mat_mul(r, &g, &[1, 0, 0, di]);
        for x in &n {
            seen.set(mat_index(q, &mat_mul(r, &rep, x)));
        }
        reps.push(rep);
    };
    visit(IDENTITY, &mut seen, &mut reps);
    for i in 0..total {
        if seen.get(i) {
            continue;
        }
        let g = mat_from_index(q, i);
        if !r.is_unit(mat_det(r, &g)) {
            continue;
        }
        visit(g, &mut seen, &mut reps);
    }
    reps
}

/// Number of double cosets N\Gl2/H: label every matrix with its left
/// H-coset, then merge labels along the left action of N.
pub fn double_cosets(r: &ResidueRing) -> Result<usize> {
    check_enum(r)?;
    let q = r.size();
    let total = (q as usize).pow(4);
    let h = h_elements(r);
    let mut label = vec![u16::MAX; total];
    let mut reps: Vec<Mat> = Vec::new();
    for i in 0..total {
        if label[i] != u16::MAX {
            continue;
        }
        let g = mat_from_index(q, i);
        if !r.is_unit(mat_det(r, &g)) {
            continue;
        }
        let id = reps.len();
        if id >= u16::MAX as usize {
            return Err(Error::SizeBound { size: id as u64, bound: u16::MAX as u64 });
        }
        for x in &h {
            label[mat_index(q, &mat_mul(r, &g, x))] = id as u16;
        }
        reps.push(g);
    }
    // union-find over H-cosets
    let mut parent: Vec<usize> = (0..reps.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for nmat in n_elements(r) {
        for (j, g) in reps.iter().enumerate() {
            let k = label[mat_index(q, &mat_mul(r, &nmat, g))] as usize;
            let (a, b) = (find(&mut parent, j), find(&mut parent, k));
            if a != b {
                parent[a] = b;
            }
        }
    }
    Ok((0..reps.len()).filter(|&x| find(&mut parent, x) == x).count())
}

/// Census of cusps and components of the level-f curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub q: u64,
    pub f: Vec<u32>,
    pub h: u64,
    pub orders: GroupOrders,
    pub units: u64,
    pub cusp_count: u64,
    pub component_count: u64,
    pub geometric_cusps: u64,
    pub x0_cusp_count: u64,
    pub formula_only: bool,
}

fn gl2_field_order(qq: u64) -> u64 {
    (qq * qq - 1) * (qq * qq - qq)
}

/// Closed-form orders from the factorization of f (used beyond the
/// enumeration bound).
pub fn closed_form_orders(f: &Poly<Gf>) -> (u64, u64, u64) {
    let q = f.zero_coeff().ctx().size();
    let mut gl2 = 1u64;
    let mut units = 1u64;
    for (p, e) in f.factor_trial() {
        let qq = q.pow(p.degree().unwrap() as u32);
        gl2 *= gl2_field_order(qq) * qq.pow(4 * (e - 1));
        units *= (qq - 1) * qq.pow(e - 1);
    }
    let sl2 = gl2 / units;
    (gl2, sl2, units)
}

pub fn census(f: &Poly<Gf>, h: u64, exec: Execution) -> Result<Census> {
    let f = f.monic()?;
    let q = f.zero_coeff().ctx().size();
    let deg = f.degree().ok_or(Error::Config("f must be nonzero".into()))?;
    if deg == 0 {
        return Err(Error::Config("f must be nonconstant".into()));
    }
    let qn = q.pow(deg as u32);
    let idx = f.indices();
    if qn > MAX_ENUM_Q as u64 {
        let (gl2, sl2, units) = closed_form_orders(&f);
        let n = (q - 1) * qn * units;
        let cusp_count = h * sl2 / (qn * (q - 1));
        return Ok(Census {
            q,
            f: idx,
            h,
            orders: GroupOrders { gl2, sl2, sigma: (q - 1) * sl2, n, h: units * units * qn },
            units,
            cusp_count,
            component_count: h * units / (q - 1),
            geometric_cusps: h * gl2 / n,
            x0_cusp_count: 0,
            formula_only: true,
        });
    }
    let r = ResidueRing::new(&f)?;
    let orders = subgroups(&r, exec)?;
    let units = r.units().len() as u64;
    let cusp_count = h * orders.sl2 / (qn * (q - 1));
    let geometric_cusps = h * orders.gl2 / orders.n;
    if orders.gl2 % orders.n != 0 || orders.sl2 % (qn * (q - 1)) != 0 || geometric_cusps != cusp_count {
        return Err(Error::Internal(format!(
            "[Gl2:N] = {}/{} disagrees with |Sl2|/(Q(q-1)) = {}/{}",
            orders.gl2,
            orders.n,
            orders.sl2,
            qn * (q - 1)
        )));
    }
    let x0 = double_cosets(&r)? as u64;
    Ok(Census {
        q,
        f: idx,
        h,
        orders,
        units,
        cusp_count,
        component_count: h * units / (q - 1),
        geometric_cusps,
        x0_cusp_count: h * x0,
        formula_only: false,
    })
}
