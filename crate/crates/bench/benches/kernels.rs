use std::hint::black_box;

use chargesite::reliability::DEFAULT_RHO;
use chargesite::toy::{toy_problem, ToyConfig};
use chargesite::*;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn bundled() -> Instance {
    generate_synthetic_demand(&embedded_surabaya_parameters(), &SyntheticConfig::default(), 42).unwrap()
}

fn options() -> BuildOptions {
    BuildOptions { vehicle_reliability_rows: false, ..BuildOptions::default() }
}

fn estimators(c: &mut Criterion) {
    let inst = bundled();
    let mut g = c.benchmark_group("estimation");
    g.bench_function("sample_10k", |b| b.iter(|| sample_paired_scenarios(&inst, 10_000, black_box(7), DEFAULT_RHO).unwrap()));
    let set = sample_paired_scenarios(&inst, 10_000, 7, DEFAULT_RHO).unwrap();
    g.bench_function("mc_10k", |b| b.iter(|| mc_estimate(black_box(&set)).unwrap()));
    g.bench_function("cv_10k", |b| b.iter(|| cv_estimate(black_box(&set)).unwrap()));
    g.finish();
}

fn model(c: &mut Criterion) {
    let inst = bundled();
    let est = estimate_reliabilities(&inst, 10_000, 7, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    let mut g = c.benchmark_group("model");
    g.bench_function("build_robust", |b| b.iter(|| build_model(&inst, &est, Variant::Robust, options()).unwrap()));
    let m = build_model(&inst, &est, Variant::Robust, options()).unwrap();
    g.bench_function("presolve_robust", |b| b.iter(|| presolve(black_box(&m))));
    g.finish();
}

fn simplex(c: &mut Criterion) {
    let inst = bundled();
    let est = estimate_reliabilities(&inst, 10_000, 7, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    let pre = presolve(&build_model(&inst, &est, Variant::Robust, options()).unwrap());
    let lp = LinearProgram::relaxation(&pre.problem);
    let mut g = c.benchmark_group("simplex");
    g.sample_size(20);
    g.bench_function("robust_root_lp", |b| b.iter(|| simplex_solve(black_box(&lp), None).unwrap()));
    g.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let cfg = ToyConfig { max_stations: 4, max_nodes: 5, max_types: 2, max_demand: 5 };
    let problems: Vec<MipProblem> = (1000..1020)
        .map(|seed| {
            let (inst, est) = toy_problem(seed, &cfg);
            presolve(&build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap()).problem
        })
        .collect();
    let mut g = c.benchmark_group("bnb");
    g.bench_function("toys_x20", |b| {
        b.iter_batched(
            || problems.clone(),
            |ps| ps.iter().map(|p| solve_mip(p, &BnBConfig::default()).unwrap().nodes).sum::<u64>(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(kernels, estimators, model, simplex, branch_and_bound);
criterion_main!(kernels);
