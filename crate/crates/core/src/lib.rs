//! A need-driven agent simulator over furnished grid rooms, with novelty
//! search, minimal-criterion novelty search and a (1+1) hillclimber that
//! evolve the furnishing.
//!
//! The pipeline is: a [`catalog::Catalog`] of furniture defines the genes, a
//! [`house::House`] is the genome, [`sim::simulate`] scores it by running one
//! Sim life, [`mutation`] perturbs it, and [`search`] drives evolution.
//! [`experiment`] batches seeded runs into campaigns and writes their outputs.
//!
//! With the default `parallel` feature, population evaluation and campaign
//! runs use rayon; without it everything runs on the calling thread. Both
//! paths produce identical results.

pub mod catalog;
pub mod exec;
pub mod experiment;
pub mod house;
pub mod mutation;
pub mod need;
pub mod search;
pub mod sim;

pub use catalog::{load_catalog, Catalog, CatalogError, FurnitureObject, Validation};
pub use exec::Execution;
pub use house::{Descriptor, House, HouseError, Position, Room};
pub use mutation::{mutate, MutationConfig, MutationEvent, RngStream};
pub use need::{EffectVector, Need, NeedVector};
pub use search::{Individual, SearchConfig, SearchError};
pub use sim::{fitness, simulate, SimConfig, SimResult};
