use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use obnox_core::discrete::{build_matrix, solve_exact, solve_interchange};
use obnox_core::geometry::delaunay;
use obnox_core::refine::refine;
use obnox_core::{feasible_candidates, Instance, Point, RefineOptions, SearchBudget};
use std::hint::black_box;

fn geometry(c: &mut Criterion) {
    for n in [100, 1000] {
        let inst = Instance::generate(n).unwrap();
        c.bench_function(&format!("delaunay/{n}"), |b| b.iter(|| delaunay(black_box(inst.obnoxious())).unwrap()));
    }
    let inst = Instance::generate(1000).unwrap();
    c.bench_function("feasible_candidates/1000", |b| b.iter(|| feasible_candidates(black_box(&inst), 0.3).unwrap()));
}

fn discrete(c: &mut Criterion) {
    let inst = Instance::generate(100).unwrap();
    let cands = feasible_candidates(&inst, 0.95).unwrap();
    let matrix = build_matrix(&inst, &cands);
    let w = inst.weights();
    let mut g = c.benchmark_group("discrete");
    g.sample_size(10);
    g.bench_function("solve_exact/n100_p4", |b| b.iter(|| solve_exact(&matrix, &w, 4, &SearchBudget::default()).unwrap()));
    g.bench_function("interchange/n100_p15", |b| b.iter(|| solve_interchange(&matrix, &w, 15, 100, 0).unwrap()));
    g.finish();
}

fn continuous(c: &mut Criterion) {
    let inst = Instance::generate(100).unwrap();
    let cands = feasible_candidates(&inst, 0.95).unwrap();
    let matrix = build_matrix(&inst, &cands);
    let sol = solve_interchange(&matrix, &inst.weights(), 10, 10, 0).unwrap();
    let start: Vec<Point> = sol.selected.iter().map(|&j| cands[j].location).collect();
    c.bench_function("refine/n100_p10", |b| {
        b.iter_batched(|| start.clone(), |s| refine(&inst, 0.95, &s, &RefineOptions::default()).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group!(benches, geometry, discrete, continuous);
criterion_main!(benches);
