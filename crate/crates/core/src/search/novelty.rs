//! Novelty search with an optional minimal criterion.
//!
//! Each generation evaluates the population, then walks it in order: an
//! individual's sparseness is measured against the reference set (the
//! archive by default, optionally the rest of the population as well) as it
//! stands at that moment, and novel individuals are appended immediately.
//! The next population is bred from archive and population parents.

use rand::seq::index;
use rand::Rng;

use super::{
    distance_unchecked, ArchiveSampling, GenerationStats, Individual, NoveltyReference,
    SearchConfig, SearchError,
};
use crate::catalog::Catalog;
use crate::exec::Execution;
use crate::house::{Descriptor, House};
use crate::mutation::{mutate_house, RngStream};

/// Stream index reserved for parent selection within a generation.
const SELECTION_STREAM: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub individual: Individual,
    /// Sparseness when archived; infinite when there were no neighbors.
    pub sparseness: f64,
    pub generation: usize,
}

/// Append-only record of novel individuals.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyArchive {
    entries: Vec<ArchiveEntry>,
    pub k: usize,
    pub novelty_threshold: f64,
}

impl NoveltyArchive {
    pub fn new(k: usize, novelty_threshold: f64) -> Self {
        Self {
            entries: Vec::new(),
            k,
            novelty_threshold,
        }
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: ArchiveEntry) {
        self.entries.push(entry);
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &Descriptor> {
        self.entries.iter().map(|e| &e.individual.descriptor)
    }
}

/// Mean distance from `target` to its `k` nearest `neighbors`.
///
/// With fewer than `k` neighbors the mean runs over all of them; with none
/// the result is `+inf`.
pub fn sparseness<'a>(
    target: &Descriptor,
    neighbors: impl IntoIterator<Item = &'a Descriptor>,
    k: usize,
) -> f64 {
    let mut dists: Vec<f64> = neighbors
        .into_iter()
        .map(|d| distance_unchecked(target, d))
        .collect();
    if dists.is_empty() || k == 0 {
        return f64::INFINITY;
    }
    let k = k.min(dists.len());
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    let nearest = &mut dists[..k];
    nearest.sort_by(f64::total_cmp);
    nearest.iter().sum::<f64>() / k as f64
}

/// Sparseness of `population[index]` against the rest of the population and
/// the archive.
pub fn population_sparseness(
    population: &[Individual],
    index: usize,
    archive: &NoveltyArchive,
) -> f64 {
    let others = population
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != index)
        .map(|(_, ind)| &ind.descriptor);
    sparseness(
        &population[index].descriptor,
        others.chain(archive.descriptors()),
        archive.k,
    )
}

/// Viable under the configured criterion and sparser than the threshold.
pub fn is_novel(individual: &Individual, sparseness: f64, config: &SearchConfig) -> bool {
    config.is_viable(individual) && sparseness > config.novelty_threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentSource {
    Archive(usize),
    Population(usize),
}

#[derive(Debug, Clone)]
pub struct GenerationOutcome {
    pub evaluated: Vec<Individual>,
    pub sparseness: Vec<f64>,
    pub next: Vec<House>,
    /// Parent of each house in `next`.
    pub parents: Vec<ParentSource>,
    pub stats: GenerationStats,
}

fn draw(pool: &[usize], count: usize, rng: &mut impl Rng) -> Vec<usize> {
    if pool.is_empty() {
        return Vec::new();
    }
    if pool.len() >= count {
        index::sample(rng, pool.len(), count)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    } else {
        (0..count)
            .map(|_| pool[rng.random_range(0..pool.len())])
            .collect()
    }
}

/// Evaluates `population`, archives its novel members and breeds the next
/// population.
///
/// `generation` keys the random streams; children of generation `g` draw
/// from `(seed, g + 1, child index)`.
pub fn ns_generation(
    population: Vec<House>,
    archive: &mut NoveltyArchive,
    generation: usize,
    config: &SearchConfig,
    catalog: &Catalog,
    execution: Execution,
) -> GenerationOutcome {
    let evaluated: Vec<Individual> = execution.map(&population, |_, h| {
        Individual::evaluate(h.clone(), catalog, config)
    });
    drop(population);

    let mut scores = Vec::with_capacity(evaluated.len());
    let mut novel_added = 0;
    for (i, ind) in evaluated.iter().enumerate() {
        let score = match config.novelty_reference {
            NoveltyReference::Archive => {
                sparseness(&ind.descriptor, archive.descriptors(), archive.k)
            }
            NoveltyReference::PopulationAndArchive => population_sparseness(&evaluated, i, archive),
        };
        if is_novel(ind, score, config) {
            archive.push(ArchiveEntry {
                individual: ind.clone(),
                sparseness: score,
                generation,
            });
            novel_added += 1;
        }
        scores.push(score);
    }

    let n = evaluated.len();
    let avg_fitness = evaluated.iter().map(|i| i.effective_fitness).sum::<f64>() / n as f64;
    let population_best = evaluated
        .iter()
        .map(|i| i.effective_fitness)
        .fold(0.0, f64::max);
    let stats = GenerationStats {
        generation,
        avg_fitness,
        population_best,
        best_fitness: population_best,
        archive_size: archive.len(),
        novel_added,
    };

    let parents = select_parents(&evaluated, archive, generation, config);
    let next_gen = u32::try_from(generation + 1).expect("generation fits in u32");
    let next = execution.map(&parents, |i, parent| {
        let house = match *parent {
            ParentSource::Archive(a) => &archive.entries[a].individual.house,
            ParentSource::Population(p) => &evaluated[p].house,
        };
        let mut rng = RngStream::new(config.seed, next_gen, i as u32);
        mutate_house(house, catalog, &config.mutation, &mut rng)
    });

    GenerationOutcome {
        evaluated,
        sparseness: scores,
        next,
        parents,
        stats,
    }
}

/// One parent per child: `s = pop / 6` archive parents and `s` population
/// parents with three children each, then single-child population parents
/// for the remaining slots.
fn select_parents(
    evaluated: &[Individual],
    archive: &NoveltyArchive,
    generation: usize,
    config: &SearchConfig,
) -> Vec<ParentSource> {
    let gen_key = u32::try_from(generation + 1).expect("generation fits in u32");
    let mut rng = RngStream::new(config.seed, gen_key, SELECTION_STREAM);
    let pop_size = config.pop_size;
    let s = pop_size / 6;

    let viable_pop: Vec<usize> = (0..evaluated.len())
        .filter(|&i| config.is_viable(&evaluated[i]))
        .collect();
    let pop_pool: Vec<usize> = if config.gates_parents() && !viable_pop.is_empty() {
        viable_pop
    } else {
        (0..evaluated.len()).collect()
    };
    let archive_pool: Vec<usize> = (0..archive.len())
        .filter(|&i| !config.gates_parents() || config.is_viable(&archive.entries[i].individual))
        .collect();

    let mut parents = Vec::with_capacity(pop_size);
    let from_archive = match config.archive_sampling {
        ArchiveSampling::WithReplacement if !archive_pool.is_empty() => s,
        ArchiveSampling::WithReplacement => 0,
        ArchiveSampling::Distinct => s.min(archive_pool.len()),
    };
    let mut archive_parents: Vec<ParentSource> = draw(&archive_pool, from_archive, &mut rng)
        .into_iter()
        .map(ParentSource::Archive)
        .collect();
    archive_parents.extend(
        draw(&pop_pool, s - from_archive, &mut rng)
            .into_iter()
            .map(ParentSource::Population),
    );
    let pop_parents: Vec<ParentSource> = draw(&pop_pool, s, &mut rng)
        .into_iter()
        .map(ParentSource::Population)
        .collect();
    for p in archive_parents.into_iter().chain(pop_parents) {
        parents.extend([p; 3]);
    }
    while parents.len() < pop_size {
        let i = pop_pool[rng.random_range(0..pop_pool.len())];
        parents.push(ParentSource::Population(i));
    }
    parents
}

#[derive(Debug, Clone)]
pub struct NoveltyRun {
    pub archive: NoveltyArchive,
    pub stats: Vec<GenerationStats>,
    /// The last evaluated population.
    pub final_population: Vec<Individual>,
    /// Highest effective fitness evaluated over the run.
    pub best: Individual,
}

impl NoveltyRun {
    pub fn best_fitness(&self) -> f64 {
        self.best.effective_fitness
    }
}

/// Initial population: `pop_size` single mutations of the seed house.
pub fn initial_population(
    seed_house: &House,
    config: &SearchConfig,
    catalog: &Catalog,
    execution: Execution,
) -> Vec<House> {
    execution.map_range(config.pop_size, |i| {
        let mut rng = RngStream::new(config.seed, 0, i as u32);
        mutate_house(seed_house, catalog, &config.mutation, &mut rng)
    })
}

pub fn run_novelty_search(
    config: &SearchConfig,
    catalog: &Catalog,
    execution: Execution,
) -> Result<NoveltyRun, SearchError> {
    config.validate()?;
    let seed_house = House::seed(catalog).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let mut archive = NoveltyArchive::new(config.k, config.novelty_threshold);
    let mut stats = Vec::with_capacity(config.generations);
    let mut population = initial_population(&seed_house, config, catalog, execution);
    let mut best: Option<Individual> = None;
    let mut last = Vec::new();

    for generation in 0..config.generations {
        let outcome = ns_generation(
            population,
            &mut archive,
            generation,
            config,
            catalog,
            execution,
        );
        for ind in &outcome.evaluated {
            if best
                .as_ref()
                .is_none_or(|b| ind.effective_fitness > b.effective_fitness)
            {
                best = Some(ind.clone());
            }
        }
        let mut row = outcome.stats;
        row.best_fitness = best.as_ref().map_or(0.0, |b| b.effective_fitness);
        stats.push(row);
        population = outcome.next;
        last = outcome.evaluated;
    }

    Ok(NoveltyRun {
        archive,
        stats,
        final_population: last,
        best: best.expect("at least one generation ran"),
    })
}
