//! The Sim agent's life in a furnished room.
//!
//! Each tick runs, in order: death check, path setup, one step along the path
//! (interacting on arrival), need decay, and target selection when idle.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::house::{House, Position, Room};
use crate::need::{EffectVector, Need, NeedVector, NEED_COUNT, NEED_MAX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("goal {goal} is unreachable from {start}")]
    Unreachable { start: Position, goal: Position },
    #[error("position {0} is outside the room")]
    OutOfBounds(Position),
    #[error("invalid sim config: {0}")]
    InvalidConfig(String),
}

/// Ticks between successive one-point decrements, per need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayRates {
    pub bladder: u32,
    pub fun: u32,
    pub hunger: u32,
    pub social: u32,
    pub energy: u32,
    pub hygiene: u32,
}

impl DecayRates {
    pub fn get(&self, need: Need) -> u32 {
        match need {
            Need::Bladder => self.bladder,
            Need::Fun => self.fun,
            Need::Hunger => self.hunger,
            Need::Social => self.social,
            Need::Energy => self.energy,
            Need::Hygiene => self.hygiene,
        }
    }

    fn as_array(&self) -> [u32; NEED_COUNT] {
        Need::ALL.map(|n| self.get(n))
    }
}

impl Default for DecayRates {
    fn default() -> Self {
        Self {
            bladder: 5,
            fun: 9,
            hunger: 6,
            social: 9,
            energy: 7,
            hygiene: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub max_ticks: u32,
    pub decay_rates: DecayRates,
    /// Order in which diminished needs are attended to.
    pub needs_ranking: Vec<Need>,
    /// A need strictly below this value is diminished.
    pub threshold: f64,
    pub initial_need: f64,
    pub start: Position,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_ticks: 100,
            decay_rates: DecayRates::default(),
            needs_ranking: vec![
                Need::Hunger,
                Need::Energy,
                Need::Bladder,
                Need::Hygiene,
                Need::Social,
                Need::Fun,
            ],
            threshold: 5.0,
            initial_need: NEED_MAX,
            start: Position::new(0, 0),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.max_ticks == 0 {
            return bad("max_ticks must be positive".into());
        }
        if let Some(n) = Need::ALL
            .into_iter()
            .find(|n| self.decay_rates.get(*n) == 0)
        {
            return bad(format!("decay rate for {n} must be positive"));
        }
        let mut seen = [false; NEED_COUNT];
        for n in &self.needs_ranking {
            if std::mem::replace(&mut seen[n.index()], true) {
                return bad(format!("{n} appears twice in needs_ranking"));
            }
        }
        if self.needs_ranking.len() != NEED_COUNT {
            return bad("needs_ranking must list all six needs".into());
        }
        if !(self.threshold > 0.0 && self.threshold < NEED_MAX) {
            return bad(format!("threshold must lie in (0, {NEED_MAX})"));
        }
        if !(0.0..=NEED_MAX).contains(&self.initial_need) {
            return bad(format!("initial_need must lie in [0, {NEED_MAX}]"));
        }
        Ok(())
    }
}

/// The object the agent is heading to and the need that triggered the trip.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: String,
    pub position: Position,
    pub need: Need,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimAgent {
    pub position: Position,
    pub needs: NeedVector,
    pub target: Option<Target>,
    pub path: Option<VecDeque<Position>>,
    pub cur_tick: u32,
}

impl SimAgent {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            position: config.start,
            needs: NeedVector::splat(config.initial_need),
            target: None,
            path: None,
            cur_tick: 0,
        }
    }

    pub fn is_dead(&self) -> bool {
        self.needs[Need::Hunger] <= 0.0 || self.needs[Need::Energy] <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub tick: u32,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub fitness: f64,
    pub died: bool,
    /// Tick at which the death check fired; the Sim lived ticks before it.
    pub death_tick: Option<u32>,
    pub final_needs: NeedVector,
    pub interactions: Vec<Interaction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Idle,
    Move,
    Interact,
    MoveInteract,
}

/// One line of the optional per-tick trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u32,
    pub position: Position,
    pub needs: [f64; NEED_COUNT],
    pub action: Action,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

/// Final need total over the maximum possible; zero if the Sim died.
pub fn fitness(needs: &NeedVector, died: bool) -> f64 {
    if died {
        0.0
    } else {
        needs.total() / (NEED_MAX * NEED_COUNT as f64)
    }
}

fn passable(room: &Room, pos: Position) -> bool {
    // Rooms have no interior walls and object tiles are walkable.
    room.contains(pos)
}

fn tile_index(room: &Room, pos: Position) -> usize {
    (pos.y * room.width() + pos.x) as usize
}

/// BFS distances from `start` to every tile, `None` where unreachable.
pub fn bfs_distances(room: &Room, start: Position) -> Vec<Option<u32>> {
    let mut dist = vec![None; room.area()];
    if !room.contains(start) {
        return dist;
    }
    dist[tile_index(room, start)] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[tile_index(room, cur)].unwrap();
        for next in cur.neighbors() {
            if passable(room, next) && dist[tile_index(room, next)].is_none() {
                dist[tile_index(room, next)] = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Shortest 4-connected path from `start` to `goal`, excluding `start` and
/// including `goal`. Ties resolve by expanding Up, Down, Left, Right.
pub fn bfs_path(room: &Room, start: Position, goal: Position) -> Result<Vec<Position>, SimError> {
    for p in [start, goal] {
        if !room.contains(p) {
            return Err(SimError::OutOfBounds(p));
        }
    }
    let mut parent: Vec<Option<Position>> = vec![None; room.area()];
    let mut seen = vec![false; room.area()];
    seen[tile_index(room, start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            let mut path = Vec::new();
            let mut at = goal;
            while at != start {
                path.push(at);
                at = parent[tile_index(room, at)].expect("visited tiles have parents");
            }
            path.reverse();
            return Ok(path);
        }
        for next in cur.neighbors() {
            if passable(room, next) && !seen[tile_index(room, next)] {
                seen[tile_index(room, next)] = true;
                parent[tile_index(room, next)] = Some(cur);
                queue.push_back(next);
            }
        }
    }
    Err(SimError::Unreachable { start, goal })
}

/// Room placements resolved against the catalog once per life.
struct Layout<'a> {
    items: Vec<(Position, &'a str, EffectVector)>,
}

impl<'a> Layout<'a> {
    fn new(room: &'a Room, catalog: &Catalog) -> Self {
        let items = room
            .placements()
            .filter_map(|(p, id)| catalog.effect_of(id).ok().map(|e| (p, id, e)))
            .collect();
        Self { items }
    }
}

fn select_in_layout(
    room: &Room,
    layout: &Layout<'_>,
    agent: &SimAgent,
    config: &SimConfig,
) -> Option<Target> {
    let mut dist: Option<Vec<Option<u32>>> = None;
    for &need in &config.needs_ranking {
        if agent.needs[need] >= config.threshold {
            continue;
        }
        let dist = dist.get_or_insert_with(|| bfs_distances(room, agent.position));
        // Placements iterate row-major, so the first minimum wins ties by
        // smaller y, then smaller x.
        let best = layout
            .items
            .iter()
            .filter(|(_, _, e)| e[need] > 0.0)
            .filter_map(|(p, id, _)| dist[tile_index(room, *p)].map(|d| (d, *p, *id)))
            .min_by_key(|(d, p, _)| (*d, *p));
        if let Some((_, position, id)) = best {
            return Some(Target {
                id: id.to_string(),
                position,
                need,
            });
        }
    }
    None
}

/// Picks the nearest object that helps the highest-ranked diminished need.
///
/// Needs are scanned in ranking order; a diminished need with no helpful
/// object in the room is skipped in favour of the next diminished one.
pub fn select_target(
    room: &Room,
    agent: &SimAgent,
    config: &SimConfig,
    catalog: &Catalog,
) -> Option<Target> {
    select_in_layout(room, &Layout::new(room, catalog), agent, config)
}

/// Runs one life in the house's first room.
pub fn simulate(house: &House, config: &SimConfig, catalog: &Catalog) -> SimResult {
    run_life(house.room(), config, catalog, None)
}

/// Like [`simulate`], also returning one record per lived tick.
pub fn simulate_traced(
    house: &House,
    config: &SimConfig,
    catalog: &Catalog,
) -> (SimResult, Vec<TickRecord>) {
    let mut trace = Vec::with_capacity(config.max_ticks as usize);
    let result = run_life(house.room(), config, catalog, Some(&mut trace));
    (result, trace)
}

fn run_life(
    room: &Room,
    config: &SimConfig,
    catalog: &Catalog,
    mut trace: Option<&mut Vec<TickRecord>>,
) -> SimResult {
    let layout = Layout::new(room, catalog);
    let rates = config.decay_rates.as_array();
    let mut agent = SimAgent::new(config);
    let mut interactions = Vec::new();
    let mut death_tick = None;

    while agent.cur_tick < config.max_ticks {
        let tick = agent.cur_tick;
        if agent.is_dead() {
            death_tick = Some(tick);
            break;
        }

        if let (Some(target), None) = (&agent.target, &agent.path) {
            let path = bfs_path(room, agent.position, target.position)
                .expect("every in-bounds tile is reachable");
            agent.path = Some(path.into());
        }

        let mut moved = false;
        if let Some(next) = agent.path.as_mut().and_then(VecDeque::pop_front) {
            agent.position = next;
            moved = true;
        }

        let mut interacted = None;
        if let Some(target) = agent
            .target
            .as_ref()
            .filter(|t| t.position == agent.position)
        {
            let effect = catalog
                .effect_of(&target.id)
                .expect("layout only holds catalog objects");
            agent.needs.apply(&effect);
            interactions.push(Interaction {
                tick,
                object: target.id.clone(),
            });
            interacted = Some(target.id.clone());
            if agent.needs[target.need] >= config.threshold {
                agent.target = None;
                agent.path = None;
            }
        }

        if tick > 0 {
            for need in Need::ALL {
                if tick.is_multiple_of(rates[need.index()]) {
                    agent.needs.decrease(need, 1.0);
                }
            }
        }

        if agent.target.is_none() {
            agent.target = select_in_layout(room, &layout, &agent, config);
        }

        if let Some(trace) = trace.as_deref_mut() {
            let action = match (moved, interacted.is_some()) {
                (false, false) => Action::Idle,
                (true, false) => Action::Move,
                (false, true) => Action::Interact,
                (true, true) => Action::MoveInteract,
            };
            trace.push(TickRecord {
                tick,
                position: agent.position,
                needs: *agent.needs.as_array(),
                action,
                object: interacted,
            });
        }

        agent.cur_tick += 1;
    }

    // A vital need emptied during the final tick still counts as a death.
    if death_tick.is_none() && agent.is_dead() {
        death_tick = Some(agent.cur_tick);
    }
    let died = death_tick.is_some();
    SimResult {
        fitness: fitness(&agent.needs, died),
        died,
        death_tick,
        final_needs: agent.needs,
        interactions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> Catalog {
        Catalog::default_catalog()
    }

    #[test]
    fn fitness_extremes() {
        assert_eq!(fitness(&NeedVector::full(), false), 1.0);
        assert_eq!(fitness(&NeedVector::full(), true), 0.0);
        assert_eq!(fitness(&NeedVector::splat(5.0), false), 0.5);
    }

    #[test]
    fn bfs_trivial_paths() {
        let room = Room::default_size();
        let p = Position::new(0, 0);
        assert!(bfs_path(&room, p, p).unwrap().is_empty());
        let path = bfs_path(&room, p, Position::new(2, 0)).unwrap();
        assert_eq!(path, vec![Position::new(1, 0), Position::new(2, 0)]);
    }

    #[test]
    fn bfs_prefers_vertical_moves_first() {
        let room = Room::default_size();
        let path = bfs_path(&room, Position::new(0, 0), Position::new(1, 1)).unwrap();
        assert_eq!(path, vec![Position::new(0, 1), Position::new(1, 1)]);
    }

    #[test]
    fn bfs_out_of_bounds() {
        let room = Room::default_size();
        assert_eq!(
            bfs_path(&room, Position::new(0, 0), Position::new(7, 0)),
            Err(SimError::OutOfBounds(Position::new(7, 0)))
        );
    }

    #[test]
    fn no_target_when_satisfied() {
        let c = cat();
        let house = House::seed(&c).unwrap();
        let config = SimConfig::default();
        let agent = SimAgent::new(&config);
        assert_eq!(select_target(house.room(), &agent, &config, &c), None);
    }

    #[test]
    fn hungry_agent_targets_fridge() {
        let c = cat();
        let house = House::seed(&c).unwrap();
        let config = SimConfig::default();
        let mut agent = SimAgent::new(&config);
        agent.needs.set(Need::Hunger, 2.0);
        let t = select_target(house.room(), &agent, &config, &c).unwrap();
        assert_eq!(t.id, "fridge");
        assert_eq!(t.position, Position::new(5, 1));
        assert_eq!(t.need, Need::Hunger);
    }

    #[test]
    fn ranking_beats_distance() {
        let c = cat();
        let house = House::seed(&c).unwrap();
        let config = SimConfig::default();
        let mut agent = SimAgent::new(&config);
        agent.needs.set(Need::Hunger, 2.0);
        agent.needs.set(Need::Bladder, 1.0);
        // Toilet at (1,1) is nearer than the fridge at (5,1).
        let t = select_target(house.room(), &agent, &config, &c).unwrap();
        assert_eq!(t.id, "fridge");
    }

    #[test]
    fn skips_diminished_need_without_helper() {
        let c = cat();
        let house = House::seed(&c).unwrap();
        let config = SimConfig::default();
        let mut agent = SimAgent::new(&config);
        agent.needs.set(Need::Hygiene, 1.0);
        agent.needs.set(Need::Bladder, 4.0);
        let t = select_target(house.room(), &agent, &config, &c).unwrap();
        assert_eq!(t.id, "toilet");
        agent.needs.set(Need::Bladder, 9.0);
        assert_eq!(select_target(house.room(), &agent, &config, &c), None);
    }

    #[test]
    fn distance_tie_breaks_on_row_then_column() {
        let c = cat();
        let room = Room::default_size()
            .place(&c, "fridge", Position::new(2, 1))
            .unwrap()
            .place(&c, "microwave", Position::new(1, 2))
            .unwrap();
        let config = SimConfig {
            start: Position::new(1, 1),
            ..SimConfig::default()
        };
        let mut agent = SimAgent::new(&config);
        agent.needs.set(Need::Hunger, 2.0);
        let t = select_target(&room, &agent, &config, &c).unwrap();
        assert_eq!(t.position, Position::new(2, 1));
    }

    #[test]
    fn empty_room_death_tick_is_analytic() {
        let c = cat();
        let config = SimConfig::default();
        let result = simulate(&House::single(Room::default_size()), &config, &c);
        // Hunger loses a point every 6 ticks from 10: zero at tick 60, caught
        // by the check at the start of tick 61. Energy would last until 70.
        assert!(result.died);
        assert_eq!(result.death_tick, Some(61));
        assert_eq!(result.fitness, 0.0);
        assert!(result.interactions.is_empty());
    }

    #[test]
    fn seed_house_survives() {
        let c = cat();
        let result = simulate(&House::seed(&c).unwrap(), &SimConfig::default(), &c);
        assert!(!result.died, "{result:?}");
        assert!(result.fitness > 0.0 && result.fitness < 1.0);
        assert!(!result.interactions.is_empty());
    }

    #[test]
    fn zero_social_does_not_kill() {
        let c = cat();
        let config = SimConfig {
            initial_need: 10.0,
            ..SimConfig::default()
        };
        let result = simulate(&House::seed(&c).unwrap(), &config, &c);
        assert_eq!(result.final_needs[Need::Social], 0.0);
        assert!(!result.died);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let mut c = SimConfig::default();
        c.needs_ranking.pop();
        assert!(c.validate().is_err());
        let mut c = SimConfig::default();
        c.needs_ranking[1] = Need::Hunger;
        assert!(c.validate().is_err());
        let c = SimConfig {
            threshold: 10.0,
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = SimConfig::default();
        c.decay_rates.fun = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_ranking_puts_vital_needs_first() {
        let r = SimConfig::default().needs_ranking;
        assert!(r[..2].iter().all(|n| n.is_vital()));
    }

    #[test]
    fn trace_covers_every_lived_tick() {
        let c = cat();
        let (result, trace) = simulate_traced(&House::seed(&c).unwrap(), &SimConfig::default(), &c);
        assert_eq!(trace.len(), 100);
        assert_eq!(
            trace.iter().filter(|r| r.object.is_some()).count(),
            result.interactions.len()
        );
    }
}
