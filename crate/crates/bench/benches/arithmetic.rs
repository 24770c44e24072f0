use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use valuata::best_f;
use valuata::kummer;
use valuata::norm_ideal;
use valuata::{
    parse_expr, ASExtension, CycloField, GroupElt, GroupKind, ResidueField, SeriesField, ValueGroup,
};

fn series(c: &mut Criterion) {
    let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 32).unwrap();
    let a = parse_expr("X^(-2) + 2*X + X^(3) + 2*X^(7)", &k).unwrap();
    let b = parse_expr("1 + X + 2*X^(2) + X^(5)", &k).unwrap();
    c.bench_function("series/mul", |bench| {
        bench.iter(|| k.mul(black_box(&a), black_box(&b)))
    });
    c.bench_function("series/invert", |bench| {
        bench.iter(|| k.invert(black_box(&b)).unwrap())
    });
}

fn extension(c: &mut Criterion) {
    let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 24).unwrap();
    let f = k.x_pow(GroupElt::int(-2)).unwrap();
    let ext = ASExtension::new(k.clone(), f).unwrap();
    let b = ext
        .from_coeffs(vec![
            k.one(),
            parse_expr("X + X^(2)", &k).unwrap(),
            parse_expr("2*X^(3)", &k).unwrap(),
        ])
        .unwrap();
    c.bench_function("extension/norm", |bench| {
        bench.iter(|| ext.norm(black_box(&b)).unwrap())
    });
    c.bench_function("extension/norm_by_determinant", |bench| {
        bench.iter(|| ext.norm_by_determinant(black_box(&b)))
    });
    c.bench_function("norm_ideal/y_construct", |bench| {
        bench.iter(|| norm_ideal::y_construct(&ext, black_box(&b)).unwrap())
    });
}

fn normalization(c: &mut Criterion) {
    let hull = SeriesField::new(
        ResidueField::gf(2).unwrap(),
        ValueGroup::new(GroupKind::IntInvP, 2),
        GroupElt::int(16),
    )
    .unwrap();
    let f = hull.x_pow(GroupElt::int(-1)).unwrap();
    c.bench_function("best_f/normalize_defect_12", |bench| {
        bench.iter(|| best_f::normalize(&hull, black_box(&f), 12).unwrap())
    });
    let k = CycloField::new(2, 2, false, 16).unwrap();
    let h = parse_expr("1 + pi^2", &k).unwrap();
    c.bench_function("kummer/normalize_chain", |bench| {
        bench.iter(|| kummer::normalize_h(&k, black_box(&h), 8).unwrap())
    });
}

criterion_group!(benches, series, extension, normalization);
criterion_main!(benches);
