//! Criterion suite comparing the data-parallel estimator paths against the
//! sequential reference.
//!
//! With the default `parallel` feature the measured loops run on rayon;
//! each benchmark is repeated in a 1-thread pool and in a pool sized to the
//! machine, and the `map/sequential` case calls the always-compiled
//! sequential reference directly. Building the benches with
//! `--no-default-features` measures the true sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};

use amoeba::fibers::{curve_fiber_exact, SolverConfig, Space};
use amoeba::laurent::{parse_system, ParseOptions, PolySystem};
use amoeba::measure::{amoeba_volume_grid, multivol_coamoeba, BoxDomain};
use amoeba::polytope::{conj_degrees, mixed_volume, LatticePolytope};
use amoeba::rng::SampleRng;

fn line() -> PolySystem {
    parse_system("vars: x, y\nf1: 1 + x + y\n", &ParseOptions::default()).unwrap()
}

fn thread_counts() -> Vec<usize> {
    let max = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    if max > 1 {
        vec![1, max]
    } else {
        vec![1]
    }
}

/// Run `f` under a rayon pool of the given size (parallel builds) or
/// directly (sequential builds).
fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

fn bench_multivol_coamoeba(c: &mut Criterion) {
    let sys = line();
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("multivol-coamoeba/line-2000-samples");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_function(format!("threads-{threads}"), |b| {
            b.iter(|| {
                with_threads(threads, || {
                    multivol_coamoeba(&sys, 2000, 7, &cfg).unwrap().value
                })
            })
        });
    }
    group.finish();
}

fn bench_volume_grid(c: &mut Criterion) {
    let sys = line();
    let cfg = SolverConfig::default();
    let domain = BoxDomain::symmetric(2, 10.0);
    let mut group = c.benchmark_group("volume-grid/line-120x120");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_function(format!("threads-{threads}"), |b| {
            b.iter(|| {
                with_threads(threads, || {
                    amoeba_volume_grid(&sys, &domain, &[120, 120], &cfg)
                        .unwrap()
                        .value
                })
            })
        });
    }
    group.finish();
}

fn simplex_4d() -> LatticePolytope {
    amoeba::polytope::convex_hull(&[
        vec![0, 0, 0, 0],
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
    ])
    .unwrap()
}

fn bench_mixed_volume_4d(c: &mut Criterion) {
    let simplex = simplex_4d();
    let args = vec![
        simplex.negated(),
        simplex.negated(),
        simplex.clone(),
        simplex,
    ];
    let mut group = c.benchmark_group("mixed-volume/4d-simplices");
    group.sample_size(20);
    for threads in thread_counts() {
        group.bench_function(format!("threads-{threads}"), |b| {
            b.iter(|| with_threads(threads, || mixed_volume(&args).unwrap()))
        });
    }
    group.finish();
}

fn bench_degrees_n2(c: &mut Criterion) {
    // two quadratic-support polynomials in four variables make the hulls
    // in the inclusion-exclusion sum non-trivial
    let mut rng = SampleRng::new(5);
    let mut lines = vec!["vars: x, y, z, w".to_string()];
    for k in 0..2 {
        let mut terms = vec!["1".to_string()];
        for v in ["x", "y", "z", "w"] {
            terms.push(format!("{:.3}*{v}", rng.uniform(0.5, 2.0)));
            terms.push(format!("{:.3}*{v}^2", rng.uniform(0.5, 2.0)));
        }
        lines.push(format!("f{}: {}", k + 1, terms.join(" + ")));
    }
    let sys = parse_system(&(lines.join("\n") + "\n"), &ParseOptions::default()).unwrap();
    let mut group = c.benchmark_group("conj-degrees/n2-quadratic");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_function(format!("threads-{threads}"), |b| {
            b.iter(|| with_threads(threads, || conj_degrees(&sys).unwrap()))
        });
    }
    group.finish();
}

/// The indexed map itself: rayon path vs the always-compiled sequential
/// reference on an identical fiber-counting workload.
fn bench_map_indexed(c: &mut Criterion) {
    let sys = line();
    let cfg = SolverConfig::default();
    let work = |i: usize| {
        let mut rng = SampleRng::for_index(11, i as u64);
        let q = [rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)];
        curve_fiber_exact(&sys, Space::Amoeba, &q, &cfg)
            .map(|r| r.count)
            .unwrap_or(0)
    };
    let mut group = c.benchmark_group("map-indexed/500-amoeba-fibers");
    group.sample_size(10);
    group.bench_function("map", |b| {
        b.iter(|| amoeba::par::map_indexed(500, work).iter().sum::<usize>())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            amoeba::par::map_indexed_seq(500, work)
                .iter()
                .sum::<usize>()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_multivol_coamoeba,
    bench_volume_grid,
    bench_mixed_volume_4d,
    bench_degrees_n2,
    bench_map_indexed
);
criterion_main!(benches);
