//! Divergent and greedy search over furnished rooms.
//!
//! [`novelty`] implements novelty search and its minimal-criterion variants;
//! [`hillclimb`] the (1+1) evolutionary algorithm. Both evaluate houses with
//! the same simulator and draw every random choice from per-individual
//! [`RngStream`](crate::mutation::RngStream)s, so results depend only on the
//! configuration.

pub mod hillclimb;
pub mod novelty;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::house::{Descriptor, House};
use crate::mutation::{MutationConfig, MutationError};
use crate::sim::{simulate, SimConfig, SimError};

pub use hillclimb::{run_one_plus_one, HillClimbRun};
pub use novelty::{
    initial_population, is_novel, ns_generation, population_sparseness, run_novelty_search,
    sparseness, ArchiveEntry, GenerationOutcome, NoveltyArchive, NoveltyRun, ParentSource,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("descriptor lengths differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Mutation(#[from] MutationError),
}

/// Which descriptors an individual's sparseness is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoveltyReference {
    /// The archive only, including entries added earlier in the generation.
    #[default]
    Archive,
    /// The rest of the current population plus the archive.
    PopulationAndArchive,
}

/// How archive parents are drawn when the archive holds fewer than `s`
/// entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveSampling {
    /// Draw `s` parents with replacement.
    #[default]
    WithReplacement,
    /// Use each archive entry once and give the spare slots to population
    /// parents.
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub pop_size: usize,
    pub generations: usize,
    /// Fitness below this is zeroed and barred from the archive and from
    /// parenthood. Zero disables the criterion.
    pub mc_threshold: f64,
    pub k: usize,
    pub novelty_threshold: f64,
    pub novelty_reference: NoveltyReference,
    pub archive_sampling: ArchiveSampling,
    pub seed: u64,
    /// With no criterion, still keep dead Sims out of the archive and parents.
    pub strict_viability: bool,
    pub sim: SimConfig,
    pub mutation: MutationConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            generations: 1000,
            mc_threshold: 0.0,
            k: 3,
            novelty_threshold: 2.5,
            novelty_reference: NoveltyReference::Archive,
            archive_sampling: ArchiveSampling::WithReplacement,
            seed: 0,
            strict_viability: false,
            sim: SimConfig::default(),
            mutation: MutationConfig::default(),
        }
    }
}

impl SearchConfig {
    /// Number of houses generated over a run.
    pub fn budget(&self) -> usize {
        self.pop_size * self.generations
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.pop_size == 0 {
            return bad("pop_size must be positive");
        }
        if self.generations == 0 {
            return bad("generations must be positive");
        }
        if !(0.0..1.0).contains(&self.mc_threshold) {
            return bad("mc_threshold must lie in [0, 1)");
        }
        if self.k == 0 {
            return bad("k must be positive");
        }
        if !self.novelty_threshold.is_finite() || self.novelty_threshold < 0.0 {
            return bad("novelty_threshold must be a non-negative number");
        }
        self.sim.validate()?;
        self.mutation.validate()?;
        Ok(())
    }

    /// Whether the individual may enter the archive and reproduce.
    pub fn is_viable(&self, individual: &Individual) -> bool {
        if self.mc_threshold > 0.0 {
            individual.fitness >= self.mc_threshold
        } else if self.strict_viability {
            individual.fitness > 0.0
        } else {
            true
        }
    }

    fn gates_parents(&self) -> bool {
        self.mc_threshold > 0.0 || self.strict_viability
    }
}

/// An evaluated house.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub house: House,
    pub fitness: f64,
    /// Fitness after the minimal criterion zeroes sub-threshold values.
    pub effective_fitness: f64,
    pub descriptor: Descriptor,
}

impl Individual {
    pub fn evaluate(house: House, catalog: &Catalog, config: &SearchConfig) -> Self {
        let fitness = simulate(&house, &config.sim, catalog).fitness;
        let effective_fitness = if fitness < config.mc_threshold {
            0.0
        } else {
            fitness
        };
        let descriptor = house.descriptor(catalog);
        Self {
            house,
            fitness,
            effective_fitness,
            descriptor,
        }
    }
}

/// Per-generation summary used for curves and summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub avg_fitness: f64,
    /// Best fitness in this generation's population.
    pub population_best: f64,
    /// Best fitness found so far in the run.
    pub best_fitness: f64,
    pub archive_size: usize,
    pub novel_added: usize,
}

/// Euclidean distance between two object-count descriptors.
pub fn distance(a: &Descriptor, b: &Descriptor) -> Result<f64, SearchError> {
    if a.len() != b.len() {
        return Err(SearchError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(distance_unchecked(a, b))
}

pub(crate) fn distance_unchecked(a: &Descriptor, b: &Descriptor) -> f64 {
    a.counts()
        .iter()
        .zip(b.counts())
        .map(|(x, y)| {
            let d = f64::from(*x) - f64::from(*y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::house::{Position, Room};

    #[test]
    fn distance_examples() {
        let c = Catalog::default_catalog();
        let seed = House::seed(&c).unwrap();
        let d = seed.descriptor(&c);
        assert_eq!(distance(&d, &d).unwrap(), 0.0);

        let extra = seed
            .room()
            .place(&c, "armchair", Position::new(0, 6))
            .unwrap()
            .descriptor(&c);
        assert_eq!(distance(&d, &extra).unwrap(), 1.0);

        let empty = Room::default_size().descriptor(&c);
        assert_eq!(distance(&d, &empty).unwrap(), 3f64.sqrt());
    }

    #[test]
    fn distance_dimension_mismatch() {
        let a = Descriptor(vec![0; 3]);
        let b = Descriptor(vec![0; 4]);
        assert!(matches!(
            distance(&a, &b),
            Err(SearchError::DimensionMismatch(3, 4))
        ));
    }

    #[test]
    fn mc_zeroes_effective_fitness() {
        let c = Catalog::default_catalog();
        let config = SearchConfig {
            mc_threshold: 0.1,
            ..SearchConfig::default()
        };
        let dead = Individual::evaluate(House::single(Room::default_size()), &c, &config);
        assert_eq!(dead.effective_fitness, 0.0);
        assert!(!config.is_viable(&dead));
        let seed = Individual::evaluate(House::seed(&c).unwrap(), &c, &config);
        assert_eq!(seed.effective_fitness, seed.fitness);
        assert!(config.is_viable(&seed));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        assert_eq!(SearchConfig::default().budget(), 100_000);
        let c = SearchConfig {
            mc_threshold: 1.0,
            ..SearchConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SearchConfig {
            pop_size: 0,
            ..SearchConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
