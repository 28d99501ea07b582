use std::process::Command;

use dforge::algebra::gf::FieldTower;
use dforge::algebra::Poly;
use dforge::cli::json::{CensusDoc, ErrorDoc, KSeriesDoc, ReduceDoc, ReduceInput, TateDoc};
use dforge::cli::run;
use dforge::drinfeld::rank1_universal;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["dforge"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("dforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn census_golden() {
    let (code, out, _) = call(&["census", "--q", "3", "--f", "0,1"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"{"command":"census","q":"3","f":["0","1"],"h":"1","gl2_order":"48","sl2_order":"24","sigma_order":"48","n_order":"12","h_order":"12","units":"2","cusp_count":"4","component_count":"1","geometric_cusps":"4","x0_cusp_count":"2","formula_only":false}"#
    );
    let (_, out, _) = call(&["census", "--q", "3", "--f", "0,0,1"]);
    let doc: CensusDoc = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(doc.cusp_count.0, 36);
    assert_eq!(serde_json::to_string(&doc).unwrap(), out.trim());
}

#[test]
fn census_sequential_matches_parallel() {
    for f in ["0,1", "0,0,1", "1,0,1", "2,1,1"] {
        let a = call(&["census", "--f", f]);
        let b = call(&["--sequential", "census", "--f", f]);
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn census_formula_only_beyond_enumeration() {
    let (code, out, _) = call(&["census", "--q", "3", "--f", "1,0,0,0,0,1"]);
    assert_eq!(code, 0);
    let doc: CensusDoc = serde_json::from_str(out.trim()).unwrap();
    assert!(doc.formula_only);
    assert_eq!(doc.x0_cusp_count, None);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["census", "--f", "0,x"],
        vec!["census", "--f", "0,3"],
        vec!["census", "--f", "1"],
        vec!["census", "--q", "6", "--f", "0,1"],
        vec!["census", "--f", "0,1", "--h", "0"],
        vec!["tate", "--f", "0,2"],
        vec!["frobnicate"],
        vec!["reduce", "/definitely/not/here.json"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        if args[0] != "frobnicate" {
            let e: ErrorDoc = serde_json::from_str(err.trim()).unwrap();
            assert_eq!(e.exit.0, 2);
        }
    }
}

#[test]
fn tate_document() {
    let (code, out, _) = call(&["tate", "--q", "3", "--f", "0,1", "--N", "9"]);
    assert_eq!(code, 0);
    let doc: TateDoc = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(serde_json::to_string(&doc).unwrap(), out.trim());
    assert_eq!(doc.delta.low.0, 6);
    assert_eq!(doc.g.low.0, 0);
    assert_eq!(doc.g.coeffs[0], doc.psi_tau);
    assert_eq!(doc.jinv.k.0, 6);
    assert_eq!(doc.levels.e10.low.0, -1);
    // the documents decode back to the same series
    let k = FieldTower::new(3, 1, 1).unwrap().base;
    let u = rank1_universal(&Poly::from_indices(&k, &[0, 1])).unwrap();
    for s in [&doc.g, &doc.delta, &doc.levels.e10, &doc.levels.e01] {
        let back = KSeriesDoc::encode(&u, &s.decode(&u).unwrap()).unwrap();
        assert_eq!(&back, s);
    }
}

#[test]
fn tate_precision_exit_3() {
    for n in ["1", "2", "5"] {
        let (code, _, err) = call(&["tate", "--f", "0,1", "--N", n]);
        assert_eq!(code, 3, "N = {n}");
        assert!(err.contains("insufficient precision"), "{err}");
        assert!(err.contains("--N"), "hint missing: {err}");
    }
}

#[test]
fn reduce_round_trip_from_tate() {
    let path = tmp("tate_t.json");
    let (code, _, _) = call(&["tate", "--f", "0,1", "--N", "9", "--emit-reduce", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let input: ReduceInput = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(serde_json::to_string(&input).unwrap(), text.trim());
    let (code, out, err) = call(&["reduce", path.to_str().unwrap(), "--N", "10"]);
    assert_eq!(code, 0, "{err}");
    let rep: ReduceDoc = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(rep.stable_rank.0, 1);
    assert_eq!(rep.k.0, 0);
    assert!(rep.achieved_precision.0 >= 5);
    // ψ is the constant module θ + λ^{q-1}τ carried to F_9, which the
    // input's τ-coefficient reduces to at x = 0
    assert_eq!(rep.psi[1].coeffs.first(), input.coeffs[1].coeffs.first());
    let ell = rep.lattice_generator.unwrap();
    assert_eq!(ell.low.0, -3);
    let mu = rep.mu.unwrap();
    assert_eq!((mu.low.0, mu.coeffs.len()), (0, 1));
}

fn write(name: &str, body: &str) -> String {
    let p = tmp(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn reduce_good_rank_two() {
    let p = write(
        "good.json",
        r#"{"p":"3","e":"1","m":"2","f":["0","1"],"N":"9","coeffs":[{"low":"0","prec":null,"coeffs":["1"]},{"low":"0","prec":"9","coeffs":["1"]},{"low":"0","prec":"9","coeffs":["1"]}]}"#,
    );
    let (code, out, _) = call(&["reduce", &p]);
    assert_eq!(code, 0);
    let rep: ReduceDoc = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(rep.status, "good reduction (rank 2)");
    assert_eq!(rep.stable_rank.0, 2);
    assert!(rep.lattice_generator.is_none());
}

#[test]
fn reduce_failures() {
    let frac = write(
        "frac.json",
        r#"{"p":"3","e":"1","m":"2","f":["0","1"],"N":"9","coeffs":[{"low":"0","prec":null,"coeffs":["1"]},{"low":"0","prec":"9","coeffs":["1"]},{"low":"1","prec":"9","coeffs":["1"]}]}"#,
    );
    let (code, _, err) = call(&["reduce", &frac]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("potentially stable only"));
    let short = write(
        "short.json",
        r#"{"p":"3","e":"1","m":"2","f":["0","1"],"N":"9","coeffs":[{"low":"0","prec":null,"coeffs":["1"]},{"low":"0","prec":"9","coeffs":["1"]},{"low":"0","prec":"0","coeffs":[]}]}"#,
    );
    assert_eq!(call(&["reduce", &short]).0, 3);
    let bad = write("bad.json", r#"{"p":"3","e":"1","m":"2","f":["0","1"],"N":"09","coeffs":[]}"#);
    assert_eq!(call(&["reduce", &bad]).0, 2);
    let notprime = write("np.json", r#"{"p":"4","e":"1","m":"1","f":["0","1"],"N":"9","coeffs":[]}"#);
    assert_eq!(call(&["reduce", &notprime]).0, 2);
}

#[test]
fn selftest_is_deterministic() {
    let a = call(&["selftest", "--samples", "40"]);
    let b = call(&["selftest", "--samples", "40"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let c = call(&["selftest", "--samples", "40", "--seed", "99"]);
    assert_eq!(c.0, 0);
}

#[test]
fn selftest_catches_injected_fault() {
    let (code, out, _) = call(&["selftest", "--samples", "50", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(out.lines().any(|l| l.contains("skew_ring_axioms") && !l.contains(r#""failed":"0""#)));
}

#[test]
fn size_bound_env() {
    let bin = env!("CARGO_BIN_EXE_dforge");
    let run_env = |v: &str, args: &[&str]| Command::new(bin).args(args).env("DFORGE_MAX_Q", v).output().unwrap();
    let o = run_env("lots", &["census", "--f", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_env("2", &["census", "--f", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_env("81", &["census", "--f", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    // the Tate specialization needs F_9, which a bound of 3 forbids
    let o = run_env("3", &["tate", "--f", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
}
