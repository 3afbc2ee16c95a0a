use std::hint::black_box;

use badcycle_core::balanced::is_alpha_balanced;
use badcycle_core::corpus::{random_cycling_machine, random_digraph, random_general_machine, rng};
use badcycle_core::generators::{
    counter_machine_order, gen_counter_machine, gen_cycling_construction, gen_example3_machine,
    gen_hasse_machine, gen_shift_digraph,
};
use badcycle_core::kernels::{min_cycle_mean, strong_components};
use badcycle_core::order::{
    decide_cycling_2machine, find_compatible_order, find_order_system, SearchMode,
};
use badcycle_core::reductions::{canonical_unsat_instance, sat_to_machine};
use badcycle_core::{build_auxiliary, chromatic_number_exact, is_good, path_digraph, Budget};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_rational::Rational64;

fn goodness(c: &mut Criterion) {
    let mut group = c.benchmark_group("goodness");
    let hasse = gen_hasse_machine();
    for n in [16, 64, 256] {
        let p = path_digraph(n);
        group.bench_with_input(BenchmarkId::new("hasse_on_path", n), &p, |b, p| {
            b.iter(|| is_good(black_box(p), &hasse).unwrap())
        });
    }
    let m2 = gen_counter_machine(2);
    let h = gen_cycling_construction(&m2, &counter_machine_order(2, 2), 10).unwrap();
    group.bench_function("counter_construction_m10", |b| {
        b.iter(|| is_good(black_box(&h), &m2).unwrap())
    });
    let mut r = rng(1);
    let g = random_digraph(&mut r, 40, 0.1);
    let m = random_general_machine(&mut r, 2, 6, 0.15, 0.3);
    group.bench_function("random_40_vertices_6_states", |b| {
        b.iter(|| is_good(black_box(&g), &m).unwrap())
    });
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    let mut r = rng(2);
    let g = random_digraph(&mut r, 60, 0.08);
    let m = random_general_machine(&mut r, 2, 5, 0.2, 0.3);
    let aux = build_auxiliary(&g, &m).unwrap();
    group.bench_function("scc_aux_300", |b| {
        b.iter(|| strong_components(black_box(&aux.graph)))
    });
    group.bench_function("min_cycle_mean_aux_300", |b| {
        b.iter(|| min_cycle_mean(black_box(&aux.graph)))
    });
    let shift = gen_shift_digraph(12);
    group.bench_function("balance_shift_12", |b| {
        b.iter(|| is_alpha_balanced(black_box(&shift), Rational64::new(5, 2)).unwrap())
    });
    group.finish();
}

fn orders(c: &mut Criterion) {
    let mut group = c.benchmark_group("orders");
    let mut r = rng(3);
    let machines: Vec<_> = (0..20)
        .map(|_| random_cycling_machine(&mut r, 2, 4, 0.15))
        .collect();
    group.bench_function("decide2_random_4_states", |b| {
        b.iter(|| {
            machines
                .iter()
                .filter(|m| decide_cycling_2machine(m).unwrap().has_order)
                .count()
        })
    });
    group.bench_function("search_random_4_states", |b| {
        b.iter(|| {
            machines
                .iter()
                .filter(|m| {
                    find_compatible_order(m, &mut Budget::unlimited())
                        .unwrap()
                        .is_some()
                })
                .count()
        })
    });
    let unsat = sat_to_machine(&canonical_unsat_instance()).unwrap();
    group.bench_function("search_unsat_reduction", |b| {
        b.iter(|| find_compatible_order(black_box(&unsat), &mut Budget::unlimited()).unwrap())
    });
    let ex = gen_example3_machine();
    group.bench_function("order_systems_example", |b| {
        b.iter(|| {
            find_order_system(black_box(&ex), SearchMode::All, &mut Budget::unlimited()).unwrap()
        })
    });
    group.finish();
}

fn coloring(c: &mut Criterion) {
    let mut group = c.benchmark_group("coloring");
    group.sample_size(10);
    for m in [8, 12, 14] {
        let g = gen_shift_digraph(m);
        group.bench_with_input(BenchmarkId::new("exact_shift", m), &g, |b, g| {
            b.iter(|| chromatic_number_exact(black_box(g), &mut Budget::unlimited()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, goodness, kernels, orders, coloring);
criterion_main!(benches);
