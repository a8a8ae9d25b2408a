//! Deterministic 2v2 team game: board generation, simultaneous action
//! resolution, bomb and flame physics, powerups, fog-limited observations and
//! termination.
//!
//! One call to [`GameState::step_mut`] resolves, in order: bomb clocks and
//! sliding bombs, movement, bomb placement, explosions (chained to a fixed
//! point), flame deaths, flame decay, powerup pickups.

mod observe;
mod state;
mod step;
mod types;

pub use observe::{in_view, BombView, RawObservation};
pub use state::{generate_board, generate_board_with, BoardConfig, GameState};
pub use step::blast_cross;
pub use types::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("cannot step a finished game")]
    Terminal,
    #[error("agent {0} is dead and cannot observe")]
    DeadAgent(AgentId),
}
