use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use randopt::graphopt::{exact_optimum, karp_greedy_clique, SubsetKind};
use randopt::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat};
use randopt::ksat::{dpll_solve, enumerate_solutions};
use randopt::parisi::{parisi_value, MixtureSpec, OrderParam, ParamClass, PdeGrid};
use randopt::spin::{brute_force_ground_state, guided_walk, WalkConfig};
use randopt::RngStream;

fn graphs(c: &mut Criterion) {
    let g = gen_er_graph(1024, 0.5, &RngStream::new(1, "bench/karp")).unwrap();
    let rng = RngStream::new(1, "bench/karp-order");
    c.bench_function("karp_greedy_clique n=1024", |b| b.iter(|| karp_greedy_clique(black_box(&g), &rng)));
    let g = gen_er_graph(64, 0.5, &RngStream::new(1, "bench/exact")).unwrap();
    c.bench_function("exact clique n=64", |b| {
        b.iter(|| exact_optimum(black_box(&g), SubsetKind::Clique).unwrap())
    });
}

fn spins(c: &mut Criterion) {
    let j = gen_gaussian_tensor(18, 2, &RngStream::new(1, "bench/ground")).unwrap();
    c.bench_function("brute-force ground state n=18", |b| {
        b.iter(|| brute_force_ground_state(black_box(&j)).unwrap())
    });
    let j = gen_gaussian_tensor(200, 2, &RngStream::new(1, "bench/walk")).unwrap();
    let rng = RngStream::new(1, "bench/walk-kick");
    let mut group = c.benchmark_group("guided walk");
    group.sample_size(10);
    group.bench_function("n=200", |b| {
        b.iter(|| guided_walk(black_box(&j), WalkConfig::default(), &rng).unwrap())
    });
    group.finish();
}

fn parisi(c: &mut Criterion) {
    let spec = MixtureSpec::pure(2).unwrap();
    let mut group = c.benchmark_group("parisi functional");
    for atoms in [1usize, 3] {
        let q: Vec<f64> = (0..atoms).map(|i| 0.2 + 0.6 * i as f64 / atoms as f64).collect();
        let m: Vec<f64> = (0..atoms).map(|i| 1.0 + 2.0 * i as f64).collect();
        let mu = OrderParam::from_atoms(&q, &m, ParamClass::U).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(atoms), &mu, |b, mu| {
            b.iter(|| parisi_value(black_box(mu), &spec, &PdeGrid::default()).unwrap())
        });
    }
    group.finish();
}

fn ksat(c: &mut Criterion) {
    let f = gen_ksat(150, 640, 3, &RngStream::new(1, "bench/dpll")).unwrap();
    c.bench_function("dpll n=150 c=4.27", |b| b.iter(|| dpll_solve(black_box(&f), None).unwrap()));
    let f = gen_ksat(20, 60, 3, &RngStream::new(1, "bench/enum")).unwrap();
    c.bench_function("enumerate n=20 c=3", |b| b.iter(|| enumerate_solutions(black_box(&f)).unwrap()));
}

criterion_group!(benches, graphs, spins, parisi, ksat);
criterion_main!(benches);
