use criterion::{criterion_group, criterion_main, Criterion};

use coset_walk_core::{
    evolve, rank2_measure, rho_entropy_estimate, CellSampler, CosetSpace, IrsSpec, SegmentVertex,
    SparseDist, DEFAULT_BUDGET,
};
use coset_walk_core::rng::{step_letter, stream};

fn bench_evolve(c: &mut Criterion) {
    let mu = rank2_measure();
    c.bench_function("evolve kn:3 8 steps", |b| {
        b.iter(|| {
            let space = CosetSpace::kn(3).unwrap();
            let mut d = SparseDist::point(space.root());
            for _ in 0..8 {
                d = evolve(&space, &d, &mu).unwrap();
            }
            d.support_len()
        })
    });
    c.bench_function("evolve trivial 8 steps", |b| {
        b.iter(|| {
            let space = CosetSpace::trivial();
            let mut d = SparseDist::point(space.root());
            for _ in 0..8 {
                d = evolve(&space, &d, &mu).unwrap();
            }
            d.support_len()
        })
    });
}

fn bench_cover_walk(c: &mut Criterion) {
    c.bench_function("cover walk 10^4 steps", |b| {
        b.iter(|| {
            let sampler = CellSampler::new(7, 0.5).unwrap();
            let space = CosetSpace::cover(2, SegmentVertex::root(), sampler, DEFAULT_BUDGET).unwrap();
            let mut rng = stream(1, 0);
            let mut state = space.root_state().clone();
            for _ in 0..10_000 {
                space.step_state_in_place(&mut state, step_letter(&mut rng));
            }
            state
        })
    });
}

fn bench_rho(c: &mut Criterion) {
    let mu = rank2_measure();
    c.bench_function("rho trivial n=20 walks=2000", |b| {
        b.iter(|| {
            rho_entropy_estimate(&IrsSpec::TrivialSubgroup, &mu, 20, 2000, 1, 5, DEFAULT_BUDGET)
                .unwrap()
                .estimate
        })
    });
}

criterion_group!(benches, bench_evolve, bench_cover_walk, bench_rho);
criterion_main!(benches);
