use rand::Rng;

use crate::engine::{Action, RawObservation};
use crate::hazard::{destination, HazardMap};

/// A destination inside the blast of a bomb with at most this much life left
/// is vetoed.
pub const DANGER_LIFE: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterOutcome {
    pub action: Action,
    /// The proposal was replaced.
    pub intervened: bool,
    /// Every cardinal move was rejected and Stop was returned regardless.
    pub fallback: bool,
}

/// Where `action` leads is on fire now or about to be caught in a blast.
pub fn is_unsafe(obs: &RawObservation, map: &HazardMap, action: Action) -> bool {
    map.deadly_within(destination(obs, action), DANGER_LIFE)
}

/// Vetoes a proposal whose destination is unsafe, redrawing uniformly from
/// the cardinal moves not yet rejected this tick.
pub fn apply_action_filter<R: Rng + ?Sized>(
    obs: &RawObservation,
    proposed: Action,
    rng: &mut R,
) -> FilterOutcome {
    let map = HazardMap::new(obs);
    if !is_unsafe(obs, &map, proposed) {
        return FilterOutcome {
            action: proposed,
            intervened: false,
            fallback: false,
        };
    }
    let mut candidates = [Action::Stop; 4];
    let mut len = 0;
    for a in Action::MOVES.into_iter().filter(|&a| a != proposed) {
        candidates[len] = a;
        len += 1;
    }
    while len > 0 {
        let i = rng.gen_range(0..len);
        let pick = candidates[i];
        if !is_unsafe(obs, &map, pick) {
            return FilterOutcome {
                action: pick,
                intervened: true,
                fallback: false,
            };
        }
        // keep the remaining candidates in their original order
        candidates.copy_within(i + 1..len, i);
        len -= 1;
    }
    FilterOutcome {
        action: Action::Stop,
        intervened: proposed != Action::Stop,
        fallback: true,
    }
}
