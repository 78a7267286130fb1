use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use simsim::search::{initial_population, ns_generation, NoveltyArchive};
use simsim::{simulate, Catalog, Execution, House, SearchConfig};

fn executions() -> Vec<(&'static str, Execution)> {
    #[allow(unused_mut)]
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn population(catalog: &Catalog, size: usize) -> Vec<House> {
    let config = SearchConfig {
        pop_size: size,
        ..SearchConfig::default()
    };
    let seed = House::seed(catalog).unwrap();
    initial_population(&seed, &config, catalog, Execution::Sequential)
}

fn evaluation(c: &mut Criterion) {
    let catalog = Catalog::default_catalog();
    let sim = SearchConfig::default().sim;
    let houses = population(&catalog, 100);
    let mut group = c.benchmark_group("evaluate_100");
    for (name, execution) in executions() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| execution.map(&houses, |_, h| simulate(h, &sim, &catalog).fitness))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let catalog = Catalog::default_catalog();
    let config = SearchConfig {
        pop_size: 100,
        mc_threshold: 0.1,
        ..SearchConfig::default()
    };
    let seed = House::seed(&catalog).unwrap();
    let pop = initial_population(&seed, &config, &catalog, Execution::Sequential);
    let mut group = c.benchmark_group("ns_generation_100");
    for (name, execution) in executions() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let mut archive = NoveltyArchive::new(config.k, config.novelty_threshold);
                ns_generation(pop.clone(), &mut archive, 0, &config, &catalog, execution)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, evaluation, generation);
criterion_main!(benches);
