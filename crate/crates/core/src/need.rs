//! The six Sim needs and the vectors that carry per-need values.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Upper bound of every need meter.
pub const NEED_MAX: f64 = 10.0;

/// Number of needs a Sim tracks.
pub const NEED_COUNT: usize = 6;

/// A single need meter. Declaration order is the canonical iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Need {
    Bladder,
    Fun,
    Hunger,
    Social,
    Energy,
    Hygiene,
}

impl Need {
    pub const ALL: [Need; NEED_COUNT] = [
        Need::Bladder,
        Need::Fun,
        Need::Hunger,
        Need::Social,
        Need::Energy,
        Need::Hygiene,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Need::Bladder => "bladder",
            Need::Fun => "fun",
            Need::Hunger => "hunger",
            Need::Social => "social",
            Need::Energy => "energy",
            Need::Hygiene => "hygiene",
        }
    }

    /// Hunger and Energy are the only needs whose depletion kills.
    pub fn is_vital(self) -> bool {
        matches!(self, Need::Hunger | Need::Energy)
    }
}

impl fmt::Display for Need {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Need {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Need::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown need `{s}`"))
    }
}

/// Satisfaction level per need. Every component stays in `[0, NEED_MAX]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeedVector([f64; NEED_COUNT]);

impl NeedVector {
    /// All needs fully satisfied.
    pub fn full() -> Self {
        Self([NEED_MAX; NEED_COUNT])
    }

    pub fn splat(value: f64) -> Self {
        Self([value.clamp(0.0, NEED_MAX); NEED_COUNT])
    }

    /// Builds a vector in canonical need order, clamping each value.
    pub fn from_array(values: [f64; NEED_COUNT]) -> Self {
        Self(values.map(|v| v.clamp(0.0, NEED_MAX)))
    }

    pub fn get(&self, need: Need) -> f64 {
        self.0[need.index()]
    }

    pub fn set(&mut self, need: Need, value: f64) {
        self.0[need.index()] = value.clamp(0.0, NEED_MAX);
    }

    /// Subtracts `amount` from one need, flooring at zero.
    pub fn decrease(&mut self, need: Need, amount: f64) {
        self.set(need, self.get(need) - amount);
    }

    /// Adds an effect to every need and clamps the result.
    pub fn apply(&mut self, effect: &EffectVector) {
        for need in Need::ALL {
            self.set(need, self.get(need) + effect.get(need));
        }
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_array(&self) -> &[f64; NEED_COUNT] {
        &self.0
    }
}

impl Default for NeedVector {
    fn default() -> Self {
        Self::full()
    }
}

impl Index<Need> for NeedVector {
    type Output = f64;

    fn index(&self, need: Need) -> &f64 {
        &self.0[need.index()]
    }
}

/// Per-interaction change applied to each need. Components may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EffectVector([f64; NEED_COUNT]);

impl EffectVector {
    pub fn new(values: [f64; NEED_COUNT]) -> Self {
        Self(values)
    }

    pub fn get(&self, need: Need) -> f64 {
        self.0[need.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Largest single component.
    pub fn max_component(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn as_array(&self) -> &[f64; NEED_COUNT] {
        &self.0
    }
}

impl Index<Need> for EffectVector {
    type Output = f64;

    fn index(&self, need: Need) -> &f64 {
        &self.0[need.index()]
    }
}

impl IndexMut<Need> for EffectVector {
    fn index_mut(&mut self, need: Need) -> &mut f64 {
        &mut self.0[need.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_matches_index() {
        for (i, need) in Need::ALL.iter().enumerate() {
            assert_eq!(need.index(), i);
        }
        let mut sorted = Need::ALL;
        sorted.sort();
        assert_eq!(sorted, Need::ALL);
    }

    #[test]
    fn only_hunger_and_energy_are_vital() {
        let vital: Vec<_> = Need::ALL.into_iter().filter(|n| n.is_vital()).collect();
        assert_eq!(vital, vec![Need::Hunger, Need::Energy]);
    }

    #[test]
    fn apply_clamps_both_ends() {
        let mut needs = NeedVector::splat(9.5);
        needs.apply(&EffectVector::new([1.0, -20.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(needs.get(Need::Bladder), NEED_MAX);
        assert_eq!(needs.get(Need::Fun), 0.0);
        assert_eq!(needs.get(Need::Hunger), 9.5);
    }

    #[test]
    fn parse_need_names() {
        assert_eq!("Hunger".parse::<Need>().unwrap(), Need::Hunger);
        assert!("thirst".parse::<Need>().is_err());
    }
}
