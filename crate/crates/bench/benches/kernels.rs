use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sqalg::bundlecalc::{BundleKind, FiberBundleData};
use sqalg::charclass::{ClassifyingSpacePresentation, Space};
use sqalg::steenrod::{self, RewriteStrategy, SqWord};

fn adem(c: &mut Criterion) {
    let w = SqWord::new([1, 2, 1, 2, 1, 2, 4]);
    c.bench_function("adem_normalize uncached [1,2,1,2,1,2,4]", |b| {
        b.iter(|| steenrod::adem_normalize_with(black_box(&w), RewriteStrategy::Leftmost))
    });
}

fn coproduct(c: &mut Criterion) {
    let basis: Vec<_> = steenrod::basis(12).into_iter().map(steenrod::SteenrodElt::from_adm).collect();
    c.bench_function("coproduct of the degree-12 basis", |b| {
        b.iter(|| basis.iter().map(|x| steenrod::coproduct(black_box(x)).len()).sum::<usize>())
    });
}

fn primitives(c: &mut Criterion) {
    let mut g = c.benchmark_group("primitives");
    g.sample_size(10);
    g.bench_function("BSpin literal kernel, degree 24", |b| {
        b.iter(|| {
            let p = ClassifyingSpacePresentation::new(Space::Bspin, 24).unwrap();
            p.literal_primitive_basis(black_box(24)).unwrap()
        })
    });
    g.finish();
}

fn fiber_integrate(c: &mut Criterion) {
    let r = FiberBundleData::preset(BundleKind::Hp2).unwrap().total.ring().clone();
    let f = r.parse("u2^4*u3^2*u4^3*u8 + u4^6 + u2^2*u8^2").unwrap();
    c.bench_function("HP2 fiber integration, fresh bundle", |b| {
        b.iter(|| {
            let bundle = FiberBundleData::preset(BundleKind::Hp2).unwrap();
            bundle.fiber_integrate(black_box(&f)).unwrap()
        })
    });
}

criterion_group!(benches, adem, coproduct, primitives, fiber_integrate);
criterion_main!(benches);
