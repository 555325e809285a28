use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relreward_core::dsl::fuzz::random_snapshot;
use relreward_core::dsl::{compile, evaluate, static_bounds};
use relreward_core::fixtures;

fn compile_fixtures(c: &mut Criterion) {
    c.bench_function("compile/all_fixtures", |b| {
        b.iter(|| {
            for f in fixtures::ALL {
                std::hint::black_box(compile(f.source).unwrap());
            }
        })
    });
    let programs: Vec<_> = fixtures::ALL.iter().map(|f| f.program()).collect();
    c.bench_function("static_bounds/all_fixtures", |b| {
        b.iter(|| programs.iter().map(static_bounds).count())
    });
}

fn evaluate_fixtures(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for f in fixtures::ALL {
        let program = f.program();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snapshots: Vec<_> = (0..256).map(|t| random_snapshot(&mut rng, f.game, t)).collect();
        group.bench_function(f.file.trim_end_matches(".rw"), |b| {
            b.iter(|| snapshots.iter().map(|s| evaluate(&program, s).reward).sum::<f64>())
        });
    }
    group.finish();
}

criterion_group!(benches, compile_fixtures, evaluate_fixtures);
criterion_main!(benches);
