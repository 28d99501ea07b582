//! Line-delimited JSON documents.
//!
//! Integers travel as canonical decimal strings so that parse then
//! serialize reproduces the input byte for byte. Field order is the struct
//! declaration order.

use std::fmt::Display;
use std::str::FromStr;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{ExtElem, Gf, GfCtx, Poly, RatFunc, Ring, Series};
use crate::drinfeld::{KPrime, UniversalRank1};
use crate::error::{Error, Result};
use crate::tate::XSeries;

/// An integer written as a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Int<T>(pub T);

impl<T: Display> Serialize for Int<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de, T> Deserialize<'de> for Int<T>
where
    T: FromStr + Display,
    T::Err: Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let v: T = s.parse().map_err(D::Error::custom)?;
        // "+1", "01" and "-0" would not survive a round trip
        if v.to_string() != s {
            return Err(D::Error::custom(format!("non-canonical integer {s:?}")));
        }
        Ok(Int(v))
    }
}

pub fn ints<T: Copy>(v: &[T]) -> Vec<Int<T>> {
    v.iter().map(|&x| Int(x)).collect()
}

pub fn unints<T: Copy>(v: &[Int<T>]) -> Vec<T> {
    v.iter().map(|x| x.0).collect()
}

/// A Laurent series over a finite field: Σ coeffs[i] x^{low+i} + O(x^prec).
/// Field elements are their integer indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub low: Int<i64>,
    pub prec: Option<Int<i64>>,
    pub coeffs: Vec<Int<u32>>,
}

impl SeriesDoc {
    pub fn encode(s: &Series<Gf>) -> Self {
        SeriesDoc {
            low: Int(s.low()),
            prec: s.prec().map(Int),
            coeffs: s.coeffs().iter().map(|c| Int(c.index())).collect(),
        }
    }

    pub fn decode(&self, k: &Arc<GfCtx>) -> Result<Series<Gf>> {
        let c = self
            .coeffs
            .iter()
            .map(|&Int(i)| {
                if (i as u64) < k.size() {
                    Ok(Gf::from_index(k, i))
                } else {
                    Err(Error::Config(format!("coefficient index {i} out of range for F_{}", k.size())))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(Int(p)) = self.prec {
            if p < self.low.0 {
                return Err(Error::Config(format!("series precision {p} below its first exponent {}", self.low.0)));
            }
        }
        Ok(Series::new(self.low.0, c, self.prec.map(|p| p.0), &Gf::zero(k)))
    }
}

/// An element num/f^fpow of A_f, num given little-endian over F_q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfDoc {
    pub num: Vec<Int<u32>>,
    pub fpow: Int<u32>,
}

/// Coordinates of an element of R' in the basis 1, λ, λ², ...
pub fn encode_kprime(u: &UniversalRank1, x: &KPrime) -> Result<Vec<AfDoc>> {
    let n = u.ring.degree();
    (0..n)
        .map(|i| {
            let c = x.coeffs().get(i).cloned().unwrap_or_else(|| RatFunc::from_poly(Poly::zero(&Gf::zero(&u.fq))));
            let (num, k) = c
                .as_af(&u.f)
                .ok_or_else(|| Error::Internal(format!("coefficient {c:?} is not in A_f")))?;
            Ok(AfDoc { num: ints(&num.indices()), fpow: Int(k) })
        })
        .collect()
}

pub fn decode_kprime(u: &UniversalRank1, v: &[AfDoc]) -> Result<KPrime> {
    if v.len() != u.ring.degree() {
        return Err(Error::Config(format!("expected {} λ-coordinates, got {}", u.ring.degree(), v.len())));
    }
    let c = v
        .iter()
        .map(|a| {
            let idx = unints(&a.num);
            if idx.iter().any(|&i| i as u64 >= u.q) {
                return Err(Error::Config("A_f numerator index out of range".into()));
            }
            Ok(RatFunc::from_af(Poly::from_indices(&u.fq, &idx), &u.f, a.fpow.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtElem::from_coeffs(&u.ring, c))
}

/// A series over R' with coefficients in λ-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSeriesDoc {
    pub low: Int<i64>,
    pub prec: Option<Int<i64>>,
    pub coeffs: Vec<Vec<AfDoc>>,
}

impl KSeriesDoc {
    pub fn encode(u: &UniversalRank1, s: &XSeries) -> Result<Self> {
        Ok(KSeriesDoc {
            low: Int(s.low()),
            prec: s.prec().map(Int),
            coeffs: s.coeffs().iter().map(|c| encode_kprime(u, c)).collect::<Result<_>>()?,
        })
    }

    pub fn decode(&self, u: &UniversalRank1) -> Result<XSeries> {
        let c = self.coeffs.iter().map(|v| decode_kprime(u, v)).collect::<Result<Vec<_>>>()?;
        Ok(Series::new(self.low.0, c, self.prec.map(|p| p.0), &u.lambda.zero_like()))
    }
}

// ---- command documents ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusDoc {
    pub command: String,
    pub q: Int<u64>,
    pub f: Vec<Int<u32>>,
    pub h: Int<u64>,
    pub gl2_order: Int<u64>,
    pub sl2_order: Int<u64>,
    pub sigma_order: Int<u64>,
    pub n_order: Int<u64>,
    pub h_order: Int<u64>,
    pub units: Int<u64>,
    pub cusp_count: Int<u64>,
    pub component_count: Int<u64>,
    pub geometric_cusps: Int<u64>,
    /// Only computed by enumeration.
    pub x0_cusp_count: Option<Int<u64>>,
    pub formula_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JinvDoc {
    pub a: Vec<Int<u32>>,
    pub k: Int<i64>,
    pub alpha0: Vec<AfDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsDoc {
    /// λ(1,0) = e(1/x).
    pub e10: KSeriesDoc,
    /// λ(0,1) = e(1).
    pub e01: KSeriesDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TateDoc {
    pub command: String,
    pub q: Int<u64>,
    pub f: Vec<Int<u32>>,
    #[serde(rename = "N")]
    pub n: Int<i64>,
    pub achieved: Int<i64>,
    /// τ-coefficient of ψ_T, which g reduces to at x = 0.
    pub psi_tau: Vec<AfDoc>,
    pub g: KSeriesDoc,
    #[serde(rename = "Delta")]
    pub delta: KSeriesDoc,
    pub jinv: JinvDoc,
    pub levels: LevelsDoc,
}

/// Input of `reduce`: φ_T = Σ coeffs[i] τ^i over F_{q^m}((x)), q = p^e.
/// coeffs[0] is the image θ of T.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceInput {
    pub p: Int<u64>,
    pub e: Int<u32>,
    pub m: Int<u32>,
    pub f: Vec<Int<u32>>,
    #[serde(rename = "N")]
    pub n: Int<i64>,
    pub coeffs: Vec<SeriesDoc>,
    /// Optional level structure: the images of the two basis vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<SeriesDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeDoc {
    pub rise: Int<i64>,
    pub run: Int<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceDoc {
    pub command: String,
    pub status: String,
    pub stable_rank: Int<usize>,
    pub k: Int<i64>,
    pub slopes: Vec<SlopeDoc>,
    pub psi: Vec<SeriesDoc>,
    pub lattice_generator: Option<SeriesDoc>,
    pub mu: Option<SeriesDoc>,
    /// ψ, μ and ℓ are known below x^achieved_precision.
    pub achieved_precision: Int<i64>,
    /// s(ℓ) vanishes below x^lattice_check.
    pub lattice_check: Option<Int<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDoc {
    pub command: String,
    pub suite: String,
    pub seed: Int<u64>,
    pub samples: Int<usize>,
    pub passed: Int<usize>,
    pub failed: Int<usize>,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDoc {
    pub command: String,
    pub status: String,
    pub exit: Int<i32>,
    pub message: String,
}

pub fn line<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents serialize")
}
