use std::sync::Arc;

use proptest::prelude::*;

use dforge::algebra::gf::FieldTower;
use dforge::algebra::residue::ResidueRing;
use dforge::algebra::{Gf, GfCtx, Poly, Ring, Series};
use dforge::cli::json::{Int, SeriesDoc};
use dforge::cusps::{census, mat_det, mat_inv, mat_mul, Mat};
use dforge::drinfeld::DrinfeldModule;
use dforge::exec::Execution;
use dforge::reduction::{newton_slopes, stable_normalize};
use dforge::skew::{skew_kernel, skew_kernel_brute, SkewPoly};

fn f9() -> Arc<GfCtx> {
    FieldTower::new(3, 1, 2).unwrap().ext
}

fn skew_of(c: &[u32]) -> SkewPoly<Gf> {
    let k = f9();
    SkewPoly::new(c.iter().map(|&i| Gf::from_index(&k, i)).collect(), 3, &Gf::zero(&k))
}

fn skew_strategy(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..9, 0..=max)
}

fn series_of(low: i64, c: &[u32], rel: Option<i64>) -> Series<Gf> {
    let k = f9();
    Series::new(low, c.iter().map(|&i| Gf::from_index(&k, i)).collect(), rel.map(|r| low + r), &Gf::zero(&k))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn skew_associative(a in skew_strategy(4), b in skew_strategy(4), c in skew_strategy(4)) {
        let (a, b, c) = (skew_of(&a), skew_of(&b), skew_of(&c));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a * (b * c));
    }

    #[test]
    fn skew_distributive(a in skew_strategy(4), b in skew_strategy(4), c in skew_strategy(4)) {
        let (a, b, c) = (skew_of(&a), skew_of(&b), skew_of(&c));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a * c.clone() + b * c);
    }

    #[test]
    fn right_divmod_round_trip(a in skew_strategy(7), b in skew_strategy(3), lead in 1u32..9) {
        let mut b = b;
        b.push(lead);
        let (a, b) = (skew_of(&a), skew_of(&b));
        let (quot, rem) = a.right_divmod(&b).unwrap();
        prop_assert!(rem.degree().map_or(true, |d| Some(d) < b.degree()));
        prop_assert_eq!(quot * b + rem, a);
    }

    #[test]
    fn evaluation_is_additive(a in skew_strategy(4), x in 0u32..9, y in 0u32..9) {
        let k = f9();
        let a = skew_of(&a);
        let (x, y) = (Gf::from_index(&k, x), Gf::from_index(&k, y));
        prop_assert_eq!(a.eval(&(x.clone() + y.clone())), a.eval(&x) + a.eval(&y));
    }

    #[test]
    fn kernel_matches_brute_force(a in skew_strategy(2), lead in 1u32..9, c0 in 1u32..9) {
        let mut a = a;
        if a.is_empty() { a.push(c0) } else { a[0] = c0 }
        a.push(lead);
        let a = skew_of(&a);
        let mut fast = skew_kernel(&a).unwrap();
        let mut slow = skew_kernel_brute(&a);
        fast.sort();
        slow.sort();
        // separable: a_0 != 0, so the kernel has q^deg points over the
        // splitting field and never more than that over F_9
        prop_assert!(fast.len() <= 3usize.pow(a.degree().unwrap() as u32));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn series_inverse(low in -4i64..4, lead in 1u32..9, rest in prop::collection::vec(0u32..9, 0..6), rel in 1i64..10) {
        let mut c = vec![lead];
        c.extend(rest);
        let s = series_of(low, &c, Some(rel));
        let inv = s.invert().unwrap();
        prop_assert_eq!(inv.valuation(), Some(-low));
        prop_assert_eq!(inv.prec(), Some(rel - low));
        let one = Series::scalar(Gf::one(&f9()));
        prop_assert!((s * inv).eq_to(&one, rel));
    }

    #[test]
    fn series_frobenius_is_a_ring_map(a in prop::collection::vec(0u32..9, 1..5), b in prop::collection::vec(0u32..9, 1..5), rel in 1i64..8) {
        let (x, y) = (series_of(0, &a, Some(rel)), series_of(-1, &b, Some(rel)));
        prop_assert_eq!((x.clone() * y.clone()).frob(3), x.frob(3) * y.frob(3));
        prop_assert_eq!((x.clone() + y.clone()).frob(3), x.frob(3) + y.frob(3));
    }

    #[test]
    fn series_document_round_trip(low in -5i64..5, c in prop::collection::vec(0u32..9, 0..8), rel in prop::option::of(0i64..10)) {
        let s = series_of(low, &c, rel);
        let doc = SeriesDoc::encode(&s);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SeriesDoc = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&serde_json::to_string(&back).unwrap(), &text);
        prop_assert_eq!(back.decode(&f9()).unwrap(), s);
    }

    #[test]
    fn integers_are_canonical(v in any::<i64>()) {
        let text = serde_json::to_string(&Int(v)).unwrap();
        prop_assert_eq!(&text, &format!("\"{v}\""));
        let back: Int<i64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, Int(v));
        let padded = format!("\"0{}\"", v.unsigned_abs());
        prop_assert!(serde_json::from_str::<Int<i64>>(&padded).is_err());
    }

    #[test]
    fn determinant_is_multiplicative(a in prop::array::uniform4(0u32..9), b in prop::array::uniform4(0u32..9)) {
        let k = FieldTower::new(3, 1, 1).unwrap().base;
        let r = ResidueRing::new(&Poly::from_indices(&k, &[0, 0, 1])).unwrap();
        let (a, b): (Mat, Mat) = (a, b);
        prop_assert_eq!(mat_det(&r, &mat_mul(&r, &a, &b)), r.mul(mat_det(&r, &a), mat_det(&r, &b)));
        if let Some(ai) = mat_inv(&r, &a) {
            prop_assert_eq!(mat_mul(&r, &a, &ai), [1, 0, 0, 1]);
        }
    }

    /// Twisting by x^j lowers every slope by j, so k moves up by j.
    #[test]
    fn normal_form_twist_class(g in 1u32..9, d in 1u32..9, s1 in -2i64..3, ds in 0i64..3, j in -3i64..4) {
        // slopes s1 <= s1 + ds on the runs 2 and 6: an integral, convex hull
        let (vg, vd) = (2 * s1, 2 * s1 + 6 * (s1 + ds));
        let k = f9();
        let x = |c: u32, v: i64| Series::new(v, vec![Gf::from_index(&k, c)], Some(v + 12), &Gf::zero(&k));
        let theta = Series::scalar(Gf::one(&k));
        let phi = DrinfeldModule::new(theta.clone(), vec![theta, x(g, vg), x(d, vd)], 3).unwrap();
        let f = Poly::from_indices(&FieldTower::new(3, 1, 1).unwrap().base, &[0, 1]);
        let slopes = newton_slopes(phi.phi_t()).unwrap();
        prop_assert!(slopes.iter().all(|s| s.slope().is_some()));
        let a = stable_normalize(&phi, &f).unwrap();
        prop_assert_eq!(a.k, -s1);
        let xi = Series::monomial(Gf::one(&k), j);
        let b = stable_normalize(&phi.twist(&xi).unwrap(), &f).unwrap();
        prop_assert_eq!(a.reduction_rank, b.reduction_rank);
        prop_assert_eq!(b.k, a.k + j);
    }
}

#[test]
fn census_identity_small_levels() {
    // [Gl2:N] * Q * (q-1) = |Sl2| and the counts agree across execution modes
    for q in [2u64, 3] {
        let k = FieldTower::new(q, 1, 1).unwrap().base;
        for deg in 1..=2u32 {
            for low in 0..q.pow(deg) {
                let mut idx: Vec<u32> = (0..deg).map(|i| ((low / q.pow(i)) % q) as u32).collect();
                idx.push(1);
                let f = Poly::from_indices(&k, &idx);
                let a = census(&f, 1, Execution::Sequential).unwrap();
                let b = census(&f, 1, Execution::default()).unwrap();
                assert_eq!(a.orders.gl2 / a.orders.n * q.pow(deg) * (q - 1), a.orders.sl2);
                assert_eq!((a.cusp_count, a.x0_cusp_count), (b.cusp_count, b.x0_cusp_count));
            }
        }
    }
}
