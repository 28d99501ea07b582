// Sequential vs rayon on the group enumerations behind the cusp census.
// Without the `parallel` feature both arms run sequentially.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dforge::algebra::gf::FieldTower;
use dforge::algebra::residue::ResidueRing;
use dforge::algebra::Poly;
use dforge::cusps::{gl2_enum, subgroups};
use dforge::exec::Execution;

fn levels() -> Vec<(&'static str, Arc<ResidueRing>)> {
    let k = FieldTower::new(3, 1, 1).unwrap().base;
    [("T", vec![0, 1]), ("T^2", vec![0, 0, 1]), ("T^2+1", vec![1, 0, 1]), ("T^3", vec![0, 0, 0, 1])]
        .into_iter()
        .map(|(n, idx)| (n, ResidueRing::new(&Poly::from_indices(&k, &idx)).unwrap()))
        .collect()
}

fn bench(c: &mut Criterion) {
    let modes = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];
    let mut g = c.benchmark_group("subgroups");
    for (name, r) in levels() {
        for (m, ex) in modes {
            g.bench_with_input(BenchmarkId::new(m, name), &r, |b, r| b.iter(|| subgroups(r, ex).unwrap()));
        }
    }
    g.finish();
    let mut g = c.benchmark_group("gl2_enum");
    for (name, r) in levels() {
        for (m, ex) in modes {
            g.bench_with_input(BenchmarkId::new(m, name), &r, |b, r| b.iter(|| gl2_enum(r, ex).unwrap().len()));
        }
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
