//! Playing full games, tournaments with side rotation, and the summaries
//! built from them.

mod stats;

pub use stats::{
    filter_sensitivity, heatmaps, rolling_reward, two_proportion_z, Delta, EvalError, Heatmaps,
    WltRow, WltTable,
};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::agents::AgentPolicy;
use crate::engine::{
    generate_board, Action, AgentId, EngineError, GameState, Outcome, StepEvents, Team, NUM_AGENTS,
};
use crate::rng;

/// Everything needed to re-simulate a game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub seed: u64,
    pub agents: [String; NUM_AGENTS],
    pub actions: Vec<[Action; NUM_AGENTS]>,
    pub outcome: Outcome,
    /// Tick (steps completed) at which each agent died.
    pub death_ticks: [Option<u32>; NUM_AGENTS],
    /// State digest after every step.
    pub digests: Vec<u64>,
}

impl GameRecord {
    pub fn length(&self) -> u32 {
        self.actions.len() as u32
    }
}

/// Seed an agent in slot `slot` receives for the game with board seed `seed`.
pub fn agent_seed(seed: u64, slot: AgentId) -> u64 {
    rng::derive_seed(seed, 1000 + slot as u64)
}

/// Plays one game from the board generated by `seed` to its end.
pub fn play_game(seed: u64, agents: &mut [&mut dyn AgentPolicy; NUM_AGENTS]) -> GameRecord {
    let mut state = generate_board(seed);
    for (slot, a) in agents.iter_mut().enumerate() {
        a.reset(agent_seed(seed, slot));
    }
    let mut record = GameRecord {
        seed,
        agents: core::array::from_fn(|i| agents[i].name()),
        actions: Vec::new(),
        outcome: Outcome::Tie,
        death_ticks: [None; NUM_AGENTS],
        digests: Vec::new(),
    };
    loop {
        let mut actions = [Action::Stop; NUM_AGENTS];
        for (slot, a) in agents.iter_mut().enumerate() {
            if let Ok(obs) = state.observe(slot) {
                actions[slot] = a.act(&obs);
            }
        }
        let events = state.step_mut(actions).expect("game is not over");
        record.actions.push(actions);
        record.digests.push(state.digest());
        for &d in &events.deaths {
            record.death_ticks[d] = Some(state.tick);
        }
        if let Some(outcome) = events.outcome {
            record.outcome = outcome;
            return record;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("engine rejected step {tick}: {source}")]
    Engine { tick: usize, source: EngineError },
    #[error("state digest differs after step {tick}")]
    Digest { tick: usize },
    #[error("game ended after {ended} steps but {recorded} were recorded")]
    Length { ended: usize, recorded: usize },
    #[error("re-simulated outcome {got:?} differs from recorded {recorded:?}")]
    Outcome { got: Outcome, recorded: Outcome },
}

/// Re-simulates a record, calling `visit` with the state before each step,
/// the actions and the resulting events.
pub fn replay(
    record: &GameRecord,
    mut visit: impl FnMut(&GameState, &[Action; NUM_AGENTS], &StepEvents),
) -> Result<GameState, ReplayError> {
    let mut state = generate_board(record.seed);
    for (tick, actions) in record.actions.iter().enumerate() {
        let (next, events) = state
            .step(*actions)
            .map_err(|source| ReplayError::Engine { tick, source })?;
        visit(&state, actions, &events);
        state = next;
        if record.digests.get(tick) != Some(&state.digest()) {
            return Err(ReplayError::Digest { tick });
        }
        if let Some(outcome) = events.outcome {
            if tick + 1 != record.actions.len() {
                return Err(ReplayError::Length {
                    ended: tick + 1,
                    recorded: record.actions.len(),
                });
            }
            if outcome != record.outcome {
                return Err(ReplayError::Outcome {
                    got: outcome,
                    recorded: record.outcome,
                });
            }
            return Ok(state);
        }
    }
    Err(ReplayError::Length {
        ended: usize::MAX,
        recorded: record.actions.len(),
    })
}

/// Slots of the learner team `[first member, second member]` for a game
/// index. Four consecutive games put each learner agent in every corner.
pub fn rotation(game_index: u64) -> [AgentId; 2] {
    match game_index % 4 {
        0 => [0, 2],
        1 => [1, 3],
        2 => [2, 0],
        _ => [3, 1],
    }
}

pub fn opponent_slots(game_index: u64) -> [AgentId; 2] {
    let [a, b] = rotation(game_index);
    [(a + 1) % NUM_AGENTS, (b + 1) % NUM_AGENTS]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchOutcome {
    Win,
    Loss,
    Tie,
}

/// Result of one game from the learner team's point of view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub game_index: u64,
    pub learner_slots: [AgentId; 2],
    pub outcome: MatchOutcome,
    pub length: u32,
    pub record: GameRecord,
}

pub fn learner_outcome(outcome: Outcome, learner_slot: AgentId) -> MatchOutcome {
    let team = if learner_slot % 2 == 0 {
        Team::Zero
    } else {
        Team::One
    };
    match outcome.winner() {
        None => MatchOutcome::Tie,
        Some(t) if t == team => MatchOutcome::Win,
        Some(_) => MatchOutcome::Loss,
    }
}

/// Seed of game `game_index` of a tournament.
pub fn match_seed(base_seed: u64, game_index: u64) -> u64 {
    rng::derive_seed(base_seed, game_index)
}

/// Plays game `game_index` with the learner team `team_a` seated according
/// to [`rotation`].
pub fn run_match(
    team_a: [&mut dyn AgentPolicy; 2],
    team_b: [&mut dyn AgentPolicy; 2],
    base_seed: u64,
    game_index: u64,
) -> MatchResult {
    let learner = rotation(game_index);
    let opp = opponent_slots(game_index);
    let [a0, a1] = team_a;
    let [b0, b1] = team_b;
    let mut seats: [Option<&mut dyn AgentPolicy>; NUM_AGENTS] = [None, None, None, None];
    seats[learner[0]] = Some(a0);
    seats[learner[1]] = Some(a1);
    seats[opp[0]] = Some(b0);
    seats[opp[1]] = Some(b1);
    let mut agents = seats.map(|s| s.expect("every seat filled"));
    let record = play_game(match_seed(base_seed, game_index), &mut agents);
    MatchResult {
        game_index,
        learner_slots: learner,
        outcome: learner_outcome(record.outcome, learner[0]),
        length: record.length(),
        record,
    }
}
