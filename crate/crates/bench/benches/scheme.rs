use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mtao_bench::{fixture, hash_identity};
use mtao_core::scheme;
use mtao_core::PairingEngine;

fn sign(c: &mut Criterion) {
    let f = fixture(1, 1);
    let (t, key, msg) = &f.signers[0];
    c.bench_function("sign", |b| b.iter(|| scheme::sign(&f.engine, key, &f.tas[*t], black_box(msg)).unwrap()));
}

fn aggregate(c: &mut Criterion) {
    let mut g = c.benchmark_group("aggregate");
    for n in [4, 16, 64] {
        let f = fixture(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f.signatures, |b, sigs| {
            b.iter(|| scheme::aggregate(black_box(sigs)).unwrap())
        });
    }
    g.finish();
}

fn verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(20);
    for (n, l) in [(4, 1), (16, 1), (16, 4)] {
        let f = fixture(n, l);
        g.bench_function(BenchmarkId::from_parameter(format!("n{n}-l{l}")), |b| {
            b.iter(|| assert!(scheme::verify(&f.engine, &f.params, black_box(&f.bundle)).unwrap().valid))
        });
    }
    g.finish();
}

fn hashing(c: &mut Criterion) {
    let f = fixture(1, 1);
    c.bench_function("hash_to_g1", |b| b.iter(|| hash_identity(&f.engine, black_box(b"bench-identity"))));
    c.bench_function("pairing", |b| b.iter(|| f.engine.pair(black_box(&f.signatures[0].0), &f.params.g2)));
}

criterion_group!(benches, sign, aggregate, verify, hashing);
criterion_main!(benches);
