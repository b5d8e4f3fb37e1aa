use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlat_core::branches::{branch_of_order, enumerate_branch};
use qlat_core::bt_tree::{ball, Limits, Vertex};
use qlat_core::exact_padic::Mat2;
use qlat_core::local_orders::{decompose_shifted_eichler, order_closure, ShiftedEichler};
use qlat_core::sampling::random_walk;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nilpotent_pair(p: u64) -> qlat_core::local_orders::LocalOrder {
    let p = p as i64;
    order_closure(&[Mat2::from_ints(0, 0, p * p, 0), Mat2::from_ints(0, p * p * p, 0, 0)], p as u64).unwrap()
}

fn balls(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball");
    for (p, r) in [(2u64, 8u32), (3, 6), (5, 4)] {
        g.bench_with_input(BenchmarkId::new(format!("p{p}"), r), &r, |b, &r| {
            b.iter(|| ball(&Vertex::standard(p), black_box(r), &Limits::default()).unwrap().len())
        });
    }
    g.finish();
}

fn branches(c: &mut Criterion) {
    let mut g = c.benchmark_group("branch");
    for p in [2u64, 3, 5] {
        let h = nilpotent_pair(p);
        g.bench_function(BenchmarkId::new("symbolic", p), |b| b.iter(|| branch_of_order(black_box(&h), &Limits::default()).unwrap()));
        g.bench_function(BenchmarkId::new("enumerate_r4", p), |b| {
            b.iter(|| enumerate_branch(black_box(&h), 0, &Vertex::standard(p), 4, &Limits::default()).unwrap().len())
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let o = Vertex::standard(3);
    let e = ShiftedEichler::new(o.clone(), random_walk(&o, 3, &mut rng), 2);
    let order = e.order();
    c.bench_function("decompose_level3_shift2", |b| {
        b.iter(|| decompose_shifted_eichler(black_box(&order), &Limits::default()).unwrap())
    });
}

criterion_group!(benches, balls, branches, decomposition);
criterion_main!(benches);
