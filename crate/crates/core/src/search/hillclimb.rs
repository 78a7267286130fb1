//! (1+1) evolutionary algorithm: keep one champion, replace it only when a
//! mutated child is strictly fitter.

use super::{GenerationStats, Individual, SearchConfig, SearchError};
use crate::catalog::Catalog;
use crate::house::House;
use crate::mutation::{mutate_house, RngStream};

#[derive(Debug, Clone)]
pub struct HillClimbRun {
    pub best: Individual,
    /// One row per child evaluated.
    pub stats: Vec<GenerationStats>,
    /// Children that replaced the champion.
    pub improvements: usize,
}

impl HillClimbRun {
    pub fn best_fitness(&self) -> f64 {
        self.best.fitness
    }
}

/// Accepts `child` over `best` only on strict improvement.
pub fn accept(best: &Individual, child: &Individual) -> bool {
    child.fitness > best.fitness
}

/// Runs through `pop_size * generations` children; child `i` draws from
/// stream `(seed, i + 1, 0)`.
pub fn run_one_plus_one(
    config: &SearchConfig,
    catalog: &Catalog,
) -> Result<HillClimbRun, SearchError> {
    config.validate()?;
    let seed_house = House::seed(catalog).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let plain = SearchConfig {
        mc_threshold: 0.0,
        ..config.clone()
    };
    let mut best = Individual::evaluate(seed_house, catalog, &plain);
    let budget = config.budget();
    let mut stats = Vec::with_capacity(budget);
    let mut improvements = 0;

    for i in 0..budget {
        let key = u32::try_from(i + 1).expect("budget fits in u32");
        let mut rng = RngStream::new(config.seed, key, 0);
        let child_house = mutate_house(&best.house, catalog, &config.mutation, &mut rng);
        let child = Individual::evaluate(child_house, catalog, &plain);
        let avg_fitness = (best.fitness + child.fitness) / 2.0;
        let population_best = best.fitness.max(child.fitness);
        if accept(&best, &child) {
            best = child;
            improvements += 1;
        }
        stats.push(GenerationStats {
            generation: i,
            avg_fitness,
            population_best,
            best_fitness: best.fitness,
            archive_size: 0,
            novel_added: 0,
        });
    }

    Ok(HillClimbRun {
        best,
        stats,
        improvements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::MutationConfig;

    fn cat() -> Catalog {
        Catalog::default_catalog()
    }

    #[test]
    fn equal_fitness_keeps_parent() {
        let c = cat();
        let config = SearchConfig::default();
        let parent = Individual::evaluate(House::seed(&c).unwrap(), &c, &config);
        let twin = parent.clone();
        assert!(!accept(&parent, &twin));
    }

    #[test]
    fn noop_mutation_never_improves() {
        let c = cat();
        let mut config = SearchConfig {
            pop_size: 1,
            generations: 50,
            ..SearchConfig::default()
        };
        config.mutation = MutationConfig {
            p_move: 0.0,
            p_delete: 0.0,
            p_add: 0.0,
            p_noop: 1.0,
        };
        let run = run_one_plus_one(&config, &c).unwrap();
        let seed = Individual::evaluate(House::seed(&c).unwrap(), &c, &config);
        assert_eq!(run.improvements, 0);
        assert_eq!(run.best.house, seed.house);
        assert!(run.stats.iter().all(|s| s.best_fitness == seed.fitness));
    }

    #[test]
    fn best_is_non_decreasing() {
        let c = cat();
        let config = SearchConfig {
            pop_size: 10,
            generations: 30,
            seed: 5,
            ..SearchConfig::default()
        };
        let run = run_one_plus_one(&config, &c).unwrap();
        assert_eq!(run.stats.len(), 300);
        assert!(run
            .stats
            .windows(2)
            .all(|w| w[1].best_fitness >= w[0].best_fitness));
    }
}
