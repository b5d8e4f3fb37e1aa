use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlat_core::exact_padic::Rat;
use qlat_core::global_classfield::forms::ClassGroup;
use qlat_core::global_classfield::{
    fundamental_unit, rep_field_comm_quadratic, spinor_class_field, BaseField, GenusSpec, Ideal, QuadElem, QuatAlgebra,
};

fn class_groups(c: &mut Criterion) {
    let mut g = c.benchmark_group("class_group");
    for disc in [-1_003i64, -10_007, 1_013, 10_009] {
        g.bench_with_input(BenchmarkId::from_parameter(disc), &disc, |b, &d| b.iter(|| ClassGroup::new(black_box(d)).unwrap().order()));
    }
    g.finish();
}

fn units(c: &mut Criterion) {
    let field = BaseField::quadratic(94).unwrap();
    c.bench_function("fundamental_unit_94", |b| b.iter(|| fundamental_unit(black_box(&field)).unwrap()));
}

fn fields(c: &mut Criterion) {
    let field = BaseField::quadratic(10).unwrap();
    let (a, g) = (QuatAlgebra::split(), GenusSpec::maximal());
    c.bench_function("sigma_sqrt10", |b| b.iter(|| spinor_class_field(black_box(&field), &a, &g).unwrap()));
    let delta = QuadElem::rational(Rat::from(2));
    c.bench_function("rep_field_sqrt10_sqrt2", |b| {
        b.iter(|| rep_field_comm_quadratic(black_box(&field), &a, &g, &delta, &Ideal::new()).unwrap())
    });
}

criterion_group!(benches, class_groups, units, fields);
criterion_main!(benches);
