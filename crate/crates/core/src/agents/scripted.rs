use alloc::collections::VecDeque;
use alloc::string::String;

use rand::seq::SliceRandom;
use rand::Rng;

use super::AgentPolicy;
use crate::engine::{blast_cross, Action, Cell, Direction, Position, RawObservation, BOARD_SIZE};
use crate::hazard::{destination, escape_route, passable, HazardMap};
use crate::rng::{self, GameRng};

/// Never moves.
#[derive(Clone, Copy, Debug, Default)]
pub struct StaticAgent;

impl AgentPolicy for StaticAgent {
    fn name(&self) -> String {
        "StaticAgent".into()
    }
    fn act(&mut self, _obs: &RawObservation) -> Action {
        Action::Stop
    }
    fn reset(&mut self, _seed: u64) {}
}

/// Uniformly random actions.
#[derive(Clone, Debug)]
pub struct RandomAgent {
    rng: GameRng,
}

impl RandomAgent {
    pub fn new() -> Self {
        Self {
            rng: rng::seeded(0),
        }
    }
}

impl Default for RandomAgent {
    fn default() -> Self {
        Self::new()
    }
}

impl AgentPolicy for RandomAgent {
    fn name(&self) -> String {
        "RandomAgent".into()
    }
    fn act(&mut self, _obs: &RawObservation) -> Action {
        Action::ALL[self.rng.gen_range(0..Action::COUNT)]
    }
    fn reset(&mut self, seed: u64) {
        self.rng = rng::seeded(seed);
    }
}

/// Places a bomb on its first turn and then stands on it.
#[derive(Clone, Copy, Debug, Default)]
pub struct TeammateSuicide {
    placed: bool,
}

impl AgentPolicy for TeammateSuicide {
    fn name(&self) -> String {
        "TeammateSuicide".into()
    }
    fn act(&mut self, _obs: &RawObservation) -> Action {
        if self.placed {
            Action::Stop
        } else {
            self.placed = true;
            Action::PlaceBomb
        }
    }
    fn reset(&mut self, _seed: u64) {
        self.placed = false;
    }
}

/// Scripted heuristic, in priority order:
///
/// 1. standing where a forecast blast will reach: follow the shortest
///    time-safe path out;
/// 2. (bombs enabled) an enemy inside the would-be blast or a wooden wall
///    next door, and a way out exists after placing: place a bomb;
/// 3. walk toward the nearest visible powerup;
/// 4. walk toward the nearest visible enemy;
/// 5. random move onto a safe neighbour.
///
/// Paths only use visible cells outside every forecast blast; ties are
/// broken by the agent's own random stream.
#[derive(Clone, Debug)]
pub struct SimpleAgent {
    bomb_enabled: bool,
    rng: GameRng,
}

impl SimpleAgent {
    pub fn new(bomb_enabled: bool) -> Self {
        Self {
            bomb_enabled,
            rng: rng::seeded(0),
        }
    }

    pub fn decide(&mut self, obs: &RawObservation) -> Action {
        let map = HazardMap::new(obs);
        let here = obs.position;

        if map.threatened(here) {
            if let Some((action, _)) = escape_route(obs, &map, 0) {
                return action;
            }
            // no way out: at least dodge the next step if possible
            let mut options = [Action::Stop; 5];
            let mut n = 0;
            for a in [
                Action::Stop,
                Action::Up,
                Action::Down,
                Action::Left,
                Action::Right,
            ] {
                if !map.lethal_during(destination(obs, a), 1) {
                    options[n] = a;
                    n += 1;
                }
            }
            return options[..n]
                .choose(&mut self.rng)
                .copied()
                .unwrap_or(Action::Stop);
        }

        if self.bomb_enabled && self.wants_bomb(obs) {
            let with_bomb = HazardMap::with_own_bomb(obs);
            if escape_route(obs, &with_bomb, 1).is_some() {
                return Action::PlaceBomb;
            }
        }

        let safe_goal = |p: Position| !map.threatened(p);
        if let Some(a) = self.path_step(obs, &map, |p| {
            obs.cell(p) == Cell::Passage
                && obs.items[p.r()][p.c()].is_some()
                && obs.bomb(p).is_none()
                && safe_goal(p)
        }) {
            return a;
        }

        if obs.enemy_positions().next().is_some() {
            let enemies = obs.enemies.map(|e| obs.agents[e]);
            if let Some(a) = self.path_step(obs, &map, |p| enemies.contains(&Some(p))) {
                return a;
            }
        }

        let mut moves = [Action::Stop; 4];
        let mut n = 0;
        for d in Direction::ALL {
            if let Some(p) = here.offset(d) {
                if passable(obs, p) && !map.threatened(p) {
                    moves[n] = d.action();
                    n += 1;
                }
            }
        }
        moves[..n]
            .choose(&mut self.rng)
            .copied()
            .unwrap_or(Action::Stop)
    }

    fn wants_bomb(&self, obs: &RawObservation) -> bool {
        if obs.ammo == 0 || obs.bomb(obs.position).is_some() {
            return false;
        }
        let here = obs.position;
        let wood_adjacent = Direction::ALL.iter().any(|&d| {
            here.offset(d)
                .is_some_and(|p| obs.cell(p) == Cell::WoodenWall)
        });
        if wood_adjacent {
            return true;
        }
        let mut cells = alloc::vec::Vec::with_capacity(16);
        blast_cross(here, obs.blast_strength, |p| obs.cell(p), &mut cells);
        obs.enemy_positions().any(|e| cells.contains(&e))
    }

    /// First move of a shortest path to a cell satisfying `goal`, walking
    /// only through passable cells outside every forecast blast.
    fn path_step(
        &mut self,
        obs: &RawObservation,
        map: &HazardMap,
        goal: impl Fn(Position) -> bool,
    ) -> Option<Action> {
        let mut dirs = Direction::ALL;
        dirs.shuffle(&mut self.rng);
        let mut seen = [[false; BOARD_SIZE]; BOARD_SIZE];
        let start = obs.position;
        seen[start.r()][start.c()] = true;
        let mut queue: VecDeque<(Position, Action)> = VecDeque::new();
        queue.push_back((start, Action::Stop));
        while let Some((p, first)) = queue.pop_front() {
            for &d in &dirs {
                let Some(n) = p.offset(d) else { continue };
                if seen[n.r()][n.c()] {
                    continue;
                }
                seen[n.r()][n.c()] = true;
                let step = if p == start { d.action() } else { first };
                if goal(n) {
                    return Some(step);
                }
                if passable(obs, n) && !map.threatened(n) {
                    queue.push_back((n, step));
                }
            }
        }
        None
    }
}

impl AgentPolicy for SimpleAgent {
    fn name(&self) -> String {
        if self.bomb_enabled {
            "SimpleAgent".into()
        } else {
            "SimpleAgent_NoBomb".into()
        }
    }
    fn act(&mut self, obs: &RawObservation) -> Action {
        self.decide(obs)
    }
    fn reset(&mut self, seed: u64) {
        self.rng = rng::seeded(seed);
    }
}
