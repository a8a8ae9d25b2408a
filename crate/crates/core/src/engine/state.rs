use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::*;
use crate::rng::{self, GameRng};

/// Board generation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoardConfig {
    pub rigid_walls: usize,
    pub wooden_walls: usize,
    /// Chance that a wooden wall hides a powerup.
    pub powerup_chance: f64,
    pub max_ticks: u32,
}

impl Default for BoardConfig {
    fn default() -> Self {
        Self {
            rigid_walls: 36,
            wooden_walls: 36,
            powerup_chance: 0.5,
            max_ticks: MAX_TICKS,
        }
    }
}

/// Authoritative state of one game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub board: [[Cell; BOARD_SIZE]; BOARD_SIZE],
    /// Powerups on the board. An item under a wooden wall is concealed; it is
    /// revealed when the wall burns.
    pub items: [[Option<PowerupKind>; BOARD_SIZE]; BOARD_SIZE],
    /// Remaining flame life per cell, 0 meaning no flame.
    pub flames: [[u8; BOARD_SIZE]; BOARD_SIZE],
    pub bombs: Vec<Bomb>,
    pub agents: [AgentState; NUM_AGENTS],
    pub tick: u32,
    pub max_ticks: u32,
    pub rng: GameRng,
}

impl GameState {
    /// Open board (passages only) with the four agents on their corners.
    pub fn empty(seed: u64) -> Self {
        Self {
            board: [[Cell::Passage; BOARD_SIZE]; BOARD_SIZE],
            items: [[None; BOARD_SIZE]; BOARD_SIZE],
            flames: [[0; BOARD_SIZE]; BOARD_SIZE],
            bombs: Vec::new(),
            agents: core::array::from_fn(AgentState::spawn),
            tick: 0,
            max_ticks: MAX_TICKS,
            rng: rng::seeded(seed),
        }
    }

    #[inline]
    pub fn cell(&self, p: Position) -> Cell {
        self.board[p.r()][p.c()]
    }

    #[inline]
    pub fn flame_at(&self, p: Position) -> bool {
        self.flames[p.r()][p.c()] > 0
    }

    pub fn bomb_at(&self, p: Position) -> Option<&Bomb> {
        self.bombs.iter().find(|b| b.position == p)
    }

    pub fn alive_agent_at(&self, p: Position) -> Option<AgentId> {
        self.agents
            .iter()
            .find(|a| a.alive && a.position == p)
            .map(|a| a.id)
    }

    pub fn flame_list(&self) -> Vec<Flame> {
        let mut out = Vec::new();
        for r in 0..BOARD_SIZE {
            for c in 0..BOARD_SIZE {
                if self.flames[r][c] > 0 {
                    out.push(Flame {
                        position: Position::new(r, c),
                        remaining_life: self.flames[r][c],
                    });
                }
            }
        }
        out
    }

    pub fn alive_count(&self) -> usize {
        self.agents.iter().filter(|a| a.alive).count()
    }

    pub fn team_alive(&self, team: Team) -> usize {
        team.members()
            .iter()
            .filter(|&&id| self.agents[id].alive)
            .count()
    }

    /// Stable 64-bit digest of the full state (FNV-1a over a canonical encoding).
    pub fn digest(&self) -> u64 {
        let mut h = Fnv::new();
        for r in 0..BOARD_SIZE {
            for c in 0..BOARD_SIZE {
                h.byte(self.board[r][c] as u8);
                h.byte(match self.items[r][c] {
                    None => 0,
                    Some(k) => 1 + k as u8,
                });
                h.byte(self.flames[r][c]);
            }
        }
        h.u64(self.bombs.len() as u64);
        for b in &self.bombs {
            h.byte(b.position.row);
            h.byte(b.position.col);
            h.byte(b.life);
            h.byte(b.blast_strength);
            h.byte(b.owner as u8);
            h.byte(match b.velocity {
                None => 0,
                Some(d) => 1 + d as u8,
            });
        }
        for a in &self.agents {
            h.byte(a.position.row);
            h.byte(a.position.col);
            h.byte(a.alive as u8);
            h.byte(a.ammo);
            h.byte(a.ammo_capacity);
            h.byte(a.blast_strength);
            h.byte(a.can_kick as u8);
        }
        h.u64(self.tick as u64);
        h.u64(self.max_ticks as u64);
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
    }
    fn u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.byte(b);
        }
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// Cells that stay open: each corner plus two cells along both edges.
fn reserved(p: Position) -> bool {
    const L: usize = BOARD_SIZE - 1;
    let (r, c) = (p.r(), p.c());
    let edge = |a: usize| a == 0 || a == L;
    let near_end = |b: usize| b.min(L - b) <= 2;
    edge(r) && near_end(c) || edge(c) && near_end(r)
}

pub fn generate_board(seed: u64) -> GameState {
    generate_board_with(seed, &BoardConfig::default())
}

/// Random transpose-symmetric layout. Rigid walls are redrawn until every
/// corner can reach every other corner through non-rigid cells.
pub fn generate_board_with(seed: u64, config: &BoardConfig) -> GameState {
    let mut state = GameState::empty(seed);
    state.max_ticks = config.max_ticks;
    let mut rng = rng::seeded(seed);

    let candidates: Vec<Position> = (0..BOARD_SIZE)
        .flat_map(|r| (r..BOARD_SIZE).map(move |c| Position::new(r, c)))
        .filter(|&p| !reserved(p))
        .collect();

    loop {
        state.board = [[Cell::Passage; BOARD_SIZE]; BOARD_SIZE];
        let mut pool = candidates.clone();
        pool.shuffle(&mut rng);
        let rest = place_symmetric(&mut state.board, pool, config.rigid_walls, Cell::RigidWall);
        if !corners_connected(&state.board) {
            continue;
        }
        place_symmetric(
            &mut state.board,
            rest,
            config.wooden_walls,
            Cell::WoodenWall,
        );
        break;
    }

    for r in 0..BOARD_SIZE {
        for c in 0..BOARD_SIZE {
            if state.board[r][c] == Cell::WoodenWall && rng.gen_bool(config.powerup_chance) {
                state.items[r][c] = Some(PowerupKind::ALL[rng.gen_range(0..3)]);
            }
        }
    }
    state.rng = rng;
    state
}

/// Fills `target` cells with `kind` from the shuffled upper-triangle `pool`,
/// mirroring each pick across the diagonal. Returns the unused pool.
fn place_symmetric(
    board: &mut [[Cell; BOARD_SIZE]; BOARD_SIZE],
    pool: Vec<Position>,
    target: usize,
    kind: Cell,
) -> Vec<Position> {
    let mut placed = 0;
    let mut rest = Vec::with_capacity(pool.len());
    // diagonal cells go in pairs so an even target never strands on parity
    let mut pending: Option<Position> = None;
    for p in pool {
        let left = target - placed;
        if p.row != p.col {
            if left >= 2 {
                board[p.r()][p.c()] = kind;
                board[p.c()][p.r()] = kind;
                placed += 2;
            } else {
                rest.push(p);
            }
        } else if left == 1 {
            board[p.r()][p.c()] = kind;
            placed += 1;
        } else if left >= 2 {
            match pending.take() {
                Some(q) => {
                    board[p.r()][p.c()] = kind;
                    board[q.r()][q.c()] = kind;
                    placed += 2;
                }
                None => pending = Some(p),
            }
        } else {
            rest.push(p);
        }
    }
    rest.extend(pending);
    rest
}

fn corners_connected(board: &[[Cell; BOARD_SIZE]; BOARD_SIZE]) -> bool {
    let mut seen = [[false; BOARD_SIZE]; BOARD_SIZE];
    let start = spawn_corner(0);
    let mut queue = VecDeque::from([start]);
    seen[start.r()][start.c()] = true;
    while let Some(p) = queue.pop_front() {
        for d in Direction::ALL {
            if let Some(n) = p.offset(d) {
                if !seen[n.r()][n.c()] && board[n.r()][n.c()] != Cell::RigidWall {
                    seen[n.r()][n.c()] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    (1..NUM_AGENTS).all(|id| {
        let p = spawn_corner(id);
        seen[p.r()][p.c()]
    })
}
