//! Lethality forecast computed from what one agent can see.
//!
//! Step numbers are relative to the observation: step 1 is the next call to
//! the engine's step. A visible flame kills during step 1 only. A bomb whose
//! (chain-adjusted) life is `L` explodes during step `L` and its flames kill
//! during steps `L` and `L + 1`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::engine::{
    blast_cross, Action, Cell, Direction, Position, RawObservation, BOARD_SIZE, BOMB_LIFE,
    FLAME_LIFE,
};

/// Longest horizon tracked, in steps.
pub const HORIZON: u8 = BOMB_LIFE + FLAME_LIFE;

#[derive(Clone, Copy, Debug)]
struct Source {
    position: Position,
    strength: u8,
    life: u8,
    velocity: Option<Direction>,
}

#[derive(Clone, Debug)]
pub struct HazardMap {
    /// Bit `k` set when the cell is lethal during step `k`.
    lethal: [[u32; BOARD_SIZE]; BOARD_SIZE],
    /// Smallest chain-adjusted life of any bomb whose blast covers the cell.
    min_life: [[u8; BOARD_SIZE]; BOARD_SIZE],
    flame: [[bool; BOARD_SIZE]; BOARD_SIZE],
}

impl HazardMap {
    pub fn new(obs: &RawObservation) -> Self {
        Self::build(obs, None)
    }

    /// Forecast as if the observer placed a bomb on its own cell this step.
    pub fn with_own_bomb(obs: &RawObservation) -> Self {
        Self::build(obs, Some((obs.position, obs.blast_strength)))
    }

    fn build(obs: &RawObservation, extra: Option<(Position, u8)>) -> Self {
        let mut sources: Vec<Source> = Vec::new();
        for r in 0..BOARD_SIZE {
            for c in 0..BOARD_SIZE {
                if let Some(b) = obs.bombs[r][c] {
                    let position = Position::new(r, c);
                    // a bomb sitting in fire goes off during the next step
                    let life = if obs.flames[r][c] > 0 {
                        1
                    } else {
                        b.life.max(1)
                    };
                    sources.push(Source {
                        position,
                        strength: b.blast_strength,
                        life,
                        velocity: b.velocity,
                    });
                }
            }
        }
        if let Some((position, strength)) = extra {
            if obs.bombs[position.r()][position.c()].is_none() {
                sources.push(Source {
                    position,
                    strength,
                    life: BOMB_LIFE,
                    velocity: None,
                });
            }
        }

        // Fog is treated as open so blasts are never underestimated.
        let cell_at = |p: Position| match obs.cell(p) {
            Cell::Fog => Cell::Passage,
            c => c,
        };
        let crosses: Vec<Vec<Position>> = sources
            .iter()
            .map(|s| {
                let mut cells = Vec::with_capacity(16);
                blast_cross(s.position, s.strength, cell_at, &mut cells);
                if let Some(dir) = s.velocity {
                    if let Some(next) = s.position.offset(dir) {
                        if cell_at(next) == Cell::Passage {
                            blast_cross(next, s.strength, cell_at, &mut cells);
                        }
                    }
                }
                cells
            })
            .collect();

        // chain: a bomb inside another's blast goes off no later than it
        let mut life: Vec<u8> = sources.iter().map(|s| s.life).collect();
        loop {
            let mut changed = false;
            for (i, cells) in crosses.iter().enumerate() {
                for (j, s) in sources.iter().enumerate() {
                    if i != j && life[i] < life[j] && cells.contains(&s.position) {
                        life[j] = life[i];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut map = HazardMap {
            lethal: [[0; BOARD_SIZE]; BOARD_SIZE],
            min_life: [[0; BOARD_SIZE]; BOARD_SIZE],
            flame: [[false; BOARD_SIZE]; BOARD_SIZE],
        };
        for r in 0..BOARD_SIZE {
            for c in 0..BOARD_SIZE {
                if obs.flames[r][c] > 0 {
                    map.flame[r][c] = true;
                    map.lethal[r][c] |= 1 << 1;
                }
            }
        }
        for (cells, &l) in crosses.iter().zip(&life) {
            for p in cells {
                let (r, c) = (p.r(), p.c());
                for k in l..l + FLAME_LIFE {
                    map.lethal[r][c] |= 1 << k;
                }
                if map.min_life[r][c] == 0 || l < map.min_life[r][c] {
                    map.min_life[r][c] = l;
                }
            }
        }
        map
    }

    #[inline]
    pub fn lethal_during(&self, p: Position, step: u8) -> bool {
        step < 32 && self.lethal[p.r()][p.c()] & (1 << step) != 0
    }

    /// True if any forecast flame ever reaches the cell.
    #[inline]
    pub fn threatened(&self, p: Position) -> bool {
        self.lethal[p.r()][p.c()] != 0
    }

    #[inline]
    pub fn flame(&self, p: Position) -> bool {
        self.flame[p.r()][p.c()]
    }

    /// Chain-adjusted life of the earliest bomb covering the cell.
    #[inline]
    pub fn earliest_blast(&self, p: Position) -> Option<u8> {
        match self.min_life[p.r()][p.c()] {
            0 => None,
            l => Some(l),
        }
    }

    /// Lethal soon: on fire now, or inside the blast of a bomb whose life is
    /// at most `within`.
    pub fn deadly_within(&self, p: Position, within: u8) -> bool {
        self.flame(p) || self.earliest_blast(p).is_some_and(|l| l <= within)
    }
}

/// Cell the observer would end up in after `action`, assuming others stand
/// still: walls, bombs, fog, board edges and visible agents block a move.
pub fn destination(obs: &RawObservation, action: Action) -> Position {
    let Some(dir) = action.direction() else {
        return obs.position;
    };
    match obs.position.offset(dir) {
        Some(p) if passable(obs, p) => p,
        _ => obs.position,
    }
}

/// A visible passage free of bombs and other agents.
#[inline]
pub fn passable(obs: &RawObservation, p: Position) -> bool {
    obs.cell(p) == Cell::Passage && obs.bomb(p).is_none() && obs.agent_at(p).is_none()
}

/// Breadth-first search over (cell, step) for the nearest cell that no
/// forecast flame ever reaches, never standing anywhere at a lethal moment.
/// `start_step` is the step already spent before moving (1 when the observer
/// uses this step to place a bomb). Returns the first move and path length.
pub fn escape_route(obs: &RawObservation, map: &HazardMap, start_step: u8) -> Option<(Action, u8)> {
    let start = obs.position;
    if start_step > 0 && map.lethal_during(start, start_step) {
        return None;
    }
    if !map.threatened(start) {
        return Some((Action::Stop, 0));
    }
    const STEPS: usize = HORIZON as usize + 2;
    let mut seen = [[[false; STEPS]; BOARD_SIZE]; BOARD_SIZE];
    let mut queue: VecDeque<(Position, u8, Action)> = VecDeque::new();
    queue.push_back((start, start_step, Action::Stop));
    seen[start.r()][start.c()][start_step as usize] = true;
    while let Some((p, t, first)) = queue.pop_front() {
        let next_t = t + 1;
        if next_t as usize >= STEPS {
            continue;
        }
        let mut options: [(Option<Position>, Action); 5] = [(Some(p), Action::Stop); 5];
        for (i, d) in Direction::ALL.iter().enumerate() {
            options[i + 1] = (p.offset(*d).filter(|&n| passable(obs, n)), d.action());
        }
        for (n, a) in options {
            let Some(n) = n else { continue };
            if map.lethal_during(n, next_t) || seen[n.r()][n.c()][next_t as usize] {
                continue;
            }
            seen[n.r()][n.c()][next_t as usize] = true;
            let first = if t == start_step { a } else { first };
            if !map.threatened(n) {
                return Some((first, next_t - start_step));
            }
            queue.push_back((n, next_t, first));
        }
    }
    None
}
