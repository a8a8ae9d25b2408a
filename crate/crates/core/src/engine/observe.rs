use serde::{Deserialize, Serialize};

use super::state::GameState;
use super::types::*;
use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BombView {
    pub blast_strength: u8,
    pub life: u8,
    pub velocity: Option<Direction>,
}

/// One agent's view of the board: the Chebyshev window of radius 5 around it
/// copied verbatim, everything else fogged. Items still hidden in wooden
/// walls are never reported.
#[derive(Clone, Debug, PartialEq)]
pub struct RawObservation {
    pub agent: AgentId,
    pub position: Position,
    pub board: [[Cell; BOARD_SIZE]; BOARD_SIZE],
    pub items: [[Option<PowerupKind>; BOARD_SIZE]; BOARD_SIZE],
    pub flames: [[u8; BOARD_SIZE]; BOARD_SIZE],
    pub bombs: [[Option<BombView>; BOARD_SIZE]; BOARD_SIZE],
    /// Positions of visible living agents, indexed by agent id.
    pub agents: [Option<Position>; NUM_AGENTS],
    pub ammo: u8,
    pub blast_strength: u8,
    pub can_kick: bool,
    pub teammate: AgentId,
    pub enemies: [AgentId; 2],
    pub tick: u32,
}

impl RawObservation {
    #[inline]
    pub fn cell(&self, p: Position) -> Cell {
        self.board[p.r()][p.c()]
    }

    #[inline]
    pub fn visible(&self, p: Position) -> bool {
        self.cell(p) != Cell::Fog
    }

    #[inline]
    pub fn bomb(&self, p: Position) -> Option<BombView> {
        self.bombs[p.r()][p.c()]
    }

    #[inline]
    pub fn flame(&self, p: Position) -> bool {
        self.flames[p.r()][p.c()] > 0
    }

    pub fn agent_at(&self, p: Position) -> Option<AgentId> {
        self.agents.iter().position(|a| *a == Some(p))
    }

    pub fn enemy_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.enemies.iter().filter_map(|&e| self.agents[e])
    }

    pub fn fog_count(&self) -> usize {
        self.board
            .iter()
            .flatten()
            .filter(|&&c| c == Cell::Fog)
            .count()
    }
}

pub fn in_view(agent: Position, p: Position) -> bool {
    agent.chebyshev(p) <= VIEW_RADIUS
}

impl GameState {
    pub fn observe(&self, agent: AgentId) -> Result<RawObservation, EngineError> {
        let me = self
            .agents
            .get(agent)
            .filter(|a| a.alive)
            .ok_or(EngineError::DeadAgent(agent))?;
        let mut obs = RawObservation {
            agent,
            position: me.position,
            board: [[Cell::Fog; BOARD_SIZE]; BOARD_SIZE],
            items: [[None; BOARD_SIZE]; BOARD_SIZE],
            flames: [[0; BOARD_SIZE]; BOARD_SIZE],
            bombs: [[None; BOARD_SIZE]; BOARD_SIZE],
            agents: [None; NUM_AGENTS],
            ammo: me.ammo,
            blast_strength: me.blast_strength,
            can_kick: me.can_kick,
            teammate: teammate_of(agent),
            enemies: enemies_of(agent),
            tick: self.tick,
        };
        let lo = |x: usize| x.saturating_sub(VIEW_RADIUS);
        let hi = |x: usize| (x + VIEW_RADIUS).min(BOARD_SIZE - 1);
        let (ar, ac) = (me.position.r(), me.position.c());
        for r in lo(ar)..=hi(ar) {
            for c in lo(ac)..=hi(ac) {
                let cell = self.board[r][c];
                obs.board[r][c] = cell;
                if cell == Cell::Passage {
                    obs.items[r][c] = self.items[r][c];
                }
                obs.flames[r][c] = self.flames[r][c];
            }
        }
        for b in &self.bombs {
            if in_view(me.position, b.position) {
                obs.bombs[b.position.r()][b.position.c()] = Some(BombView {
                    blast_strength: b.blast_strength,
                    life: b.life,
                    velocity: b.velocity,
                });
            }
        }
        for a in &self.agents {
            if a.alive && in_view(me.position, a.position) {
                obs.agents[a.id] = Some(a.position);
            }
        }
        Ok(obs)
    }
}
