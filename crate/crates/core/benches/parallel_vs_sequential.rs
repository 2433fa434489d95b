use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gaussdensity::characters::Family;
use gaussdensity::density::{family_average, TestFunctionPair};
use gaussdensity::par::Execution;
use gaussdensity::sieve::PrimeTable;
use gaussdensity::transform::tail_cutoff;
use gaussdensity::verify::symbol_oracle_mismatches;
use gaussdensity::weight::SmoothWeight;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn density(c: &mut Criterion) {
    let x = 2_000;
    let primes = PrimeTable::new(x);
    let pair = TestFunctionPair::new(1.0).unwrap();
    let weight = SmoothWeight::for_x(x as f64);
    let mut g = c.benchmark_group("family_average");
    g.sample_size(10);
    for family in [Family::Quadratic, Family::Quartic] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, family), &family, |b, &f| {
                b.iter(|| family_average(f, x, &pair, &weight, &primes, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn symbols(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbol_oracle");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| symbol_oracle_mismatches(300, exec).unwrap()));
    }
    g.finish();
}

fn transform(c: &mut Criterion) {
    let weight = SmoothWeight::new(4.0).unwrap();
    let mut g = c.benchmark_group("tail_cutoff");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| tail_cutoff(&weight, 1e-6, 400.0, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, density, symbols, transform);
criterion_main!(benches);
