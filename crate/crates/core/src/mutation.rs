//! Room mutation: move, delete or add one object, or leave the room alone.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::house::{House, Position, Room};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MutationError {
    #[error("mutation probabilities must be in [0, 1] and sum to 1, got {0:?}")]
    BadProbabilities([f64; 4]),
}

/// Deterministic random stream keyed by `(run seed, generation, index)`.
///
/// Each key selects a distinct ChaCha stream under the run seed, so streams
/// never overlap and evaluation order cannot change what an individual draws.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64, generation: u32, index: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((u64::from(generation) << 32) | u64::from(index));
        Self(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    pub p_move: f64,
    pub p_delete: f64,
    pub p_add: f64,
    pub p_noop: f64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            p_move: 0.40,
            p_delete: 0.10,
            p_add: 0.30,
            p_noop: 0.20,
        }
    }
}

impl MutationConfig {
    /// Scales the three operator probabilities to sum to one, with no no-op.
    pub fn renormalized(&self) -> Self {
        let total = self.p_move + self.p_delete + self.p_add;
        Self {
            p_move: self.p_move / total,
            p_delete: self.p_delete / total,
            p_add: self.p_add / total,
            p_noop: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), MutationError> {
        let ps = [self.p_move, self.p_delete, self.p_add, self.p_noop];
        let in_range = ps.iter().all(|p| (0.0..=1.0).contains(p));
        if !in_range || (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(MutationError::BadProbabilities(ps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationEvent {
    Move,
    Delete,
    Add,
    Noop,
}

impl MutationEvent {
    pub fn sample(config: &MutationConfig, rng: &mut impl Rng) -> Self {
        let u: f64 = rng.random();
        let mut acc = config.p_move;
        if u < acc {
            return Self::Move;
        }
        acc += config.p_delete;
        if u < acc {
            return Self::Delete;
        }
        acc += config.p_add;
        if u < acc {
            return Self::Add;
        }
        Self::Noop
    }
}

/// Applies one mutation event drawn from `config`.
pub fn mutate(room: &Room, catalog: &Catalog, config: &MutationConfig, rng: &mut impl Rng) -> Room {
    mutate_with_event(room, catalog, config, rng).0
}

/// [`mutate`], also reporting which event was drawn.
pub fn mutate_with_event(
    room: &Room,
    catalog: &Catalog,
    config: &MutationConfig,
    rng: &mut impl Rng,
) -> (Room, MutationEvent) {
    let event = MutationEvent::sample(config, rng);
    (apply_event(room, catalog, event, rng), event)
}

pub fn apply_event(
    room: &Room,
    catalog: &Catalog,
    event: MutationEvent,
    rng: &mut impl Rng,
) -> Room {
    match event {
        MutationEvent::Move => apply_move(room, rng),
        MutationEvent::Delete => apply_delete(room, rng),
        MutationEvent::Add => apply_add(room, catalog, rng),
        MutationEvent::Noop => room.clone(),
    }
}

/// Mutates one room of the house, chosen uniformly when there are several.
pub fn mutate_house(
    house: &House,
    catalog: &Catalog,
    config: &MutationConfig,
    rng: &mut impl Rng,
) -> House {
    let index = match house.rooms().len() {
        1 => 0,
        n => rng.random_range(0..n),
    };
    house.with_room(index, mutate(&house.rooms()[index], catalog, config, rng))
}

/// Adds a uniformly chosen catalog object at a uniformly chosen tile.
pub fn apply_add(room: &Room, catalog: &Catalog, rng: &mut impl Rng) -> Room {
    if catalog.is_empty() {
        return room.clone();
    }
    let object = &catalog.objects()[rng.random_range(0..catalog.len())];
    let pos = Position::new(
        rng.random_range(0..room.width()),
        rng.random_range(0..room.height()),
    );
    add_at(room, &object.id, pos)
}

/// Places `id` at `pos`, falling back to the first free neighbor in Up, Down,
/// Left, Right order. Returns the room unchanged if nothing is free.
pub fn add_at(room: &Room, id: &str, pos: Position) -> Room {
    std::iter::once(pos)
        .chain(pos.neighbors())
        .filter(|p| room.contains(*p) && !room.is_occupied(*p))
        .find_map(|p| room.place_unchecked(id, p).ok())
        .unwrap_or_else(|| room.clone())
}

/// Moves a uniformly chosen object to a uniformly chosen free tile.
pub fn apply_move(room: &Room, rng: &mut impl Rng) -> Room {
    if room.is_empty() || room.is_full() {
        return room.clone();
    }
    let from = nth_placement(room, rng.random_range(0..room.len()));
    let free = room.free_tiles();
    let to = free[rng.random_range(0..free.len())];
    room.relocate(from, to).unwrap_or_else(|_| room.clone())
}

/// Removes a uniformly chosen object.
pub fn apply_delete(room: &Room, rng: &mut impl Rng) -> Room {
    if room.is_empty() {
        return room.clone();
    }
    let pos = nth_placement(room, rng.random_range(0..room.len()));
    room.remove(pos).unwrap_or_else(|_| room.clone())
}

fn nth_placement(room: &Room, n: usize) -> Position {
    room.placements()
        .nth(n)
        .expect("index within placement count")
        .0
}
