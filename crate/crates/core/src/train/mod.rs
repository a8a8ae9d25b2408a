//! Imitation and curriculum PPO building blocks: rewards, advantage
//! estimation, the PPO learner and training-game rollouts.

mod config;
mod imitation;
mod ppo;
mod rollout;

pub use config::{CurriculumConfig, Phase, PpoConfig};
pub use imitation::{evaluate_policy, imitation_batch, majority_frequency, HoldoutReport};
pub use ppo::{PpoLearner, UpdateStats};
pub use rollout::{play_training_game, training_arming, training_seed, GameLog, RolloutOptions};

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::{Action, GameState, Team};
use crate::nn::NnError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("reward requested for a game that is still running")]
    NotTerminal,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("value and reward lengths differ ({values} vs {rewards})")]
    LengthMismatch { values: usize, rewards: usize },
    #[error("agent setup failed: {0}")]
    Agent(alloc::string::String),
    #[error(transparent)]
    Nn(#[from] NnError),
}

/// Terminal reward from the enemy count alone: both enemies still alive -1,
/// one dead 0.5, both dead 1. How they died is not considered.
pub fn shaped_reward(state: &GameState, learner_team: Team) -> Result<f64, TrainError> {
    if !state.is_terminal() {
        return Err(TrainError::NotTerminal);
    }
    Ok(match state.team_alive(learner_team.other()) {
        2 => -1.0,
        1 => 0.5,
        _ => 1.0,
    })
}

/// Plain game result: +1 for a win, -1 for a loss or a tie.
pub fn raw_reward(state: &GameState, learner_team: Team) -> Result<f64, TrainError> {
    let outcome = state.terminal_status().ok_or(TrainError::NotTerminal)?;
    Ok(match outcome.winner() {
        Some(t) if t == learner_team => 1.0,
        _ => -1.0,
    })
}

/// One learner decision.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub obs: Vec<f32>,
    pub action: Action,
    /// Log-probability of `action` under the policy that produced it. Only
    /// meaningful when `intervened` is false.
    pub log_prob: f64,
    pub value: f64,
    /// A filter or the jitter expert chose the executed action.
    pub intervened: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub game_index: u64,
    pub seed: u64,
    pub opponent: alloc::string::String,
    pub jitter_armed: bool,
    pub action_armed: bool,
}

/// A learner's decisions in one game and the single reward at its end.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Transition>,
    pub reward: f64,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    /// Reward per step: zero everywhere except the last.
    pub fn rewards(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.steps.len()];
        if let Some(last) = r.last_mut() {
            *last = self.reward;
        }
        r
    }

    pub fn values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.value).collect()
    }
}

/// `A_t = sum_k (gamma lambda)^k delta_{t+k}` with
/// `delta_t = r_t + gamma V_{t+1} - V_t` and the value past the end taken as 0.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    gamma: f64,
    lambda: f64,
) -> Result<Vec<f64>, TrainError> {
    if rewards.is_empty() {
        return Err(TrainError::EmptyTrajectory);
    }
    if rewards.len() != values.len() {
        return Err(TrainError::LengthMismatch {
            values: values.len(),
            rewards: rewards.len(),
        });
    }
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let next_v = if t + 1 < n { values[t + 1] } else { 0.0 };
        let delta = rewards[t] + gamma * next_v - values[t];
        running = delta + gamma * lambda * running;
        adv[t] = running;
    }
    Ok(adv)
}

/// Subtracts the mean and divides by the standard deviation (plus 1e-8).
pub fn normalize_advantages(adv: &mut [f64]) {
    if adv.is_empty() {
        return;
    }
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let var = adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let sd = num_traits::Float::sqrt(var);
    for a in adv {
        *a = (*a - mean) / (sd + 1e-8);
    }
}

pub fn compute_gae(
    traj: &Trajectory,
    gamma: f64,
    lambda: f64,
    normalize: bool,
) -> Result<Vec<f64>, TrainError> {
    let mut adv = gae(&traj.rewards(), &traj.values(), gamma, lambda)?;
    if normalize {
        normalize_advantages(&mut adv);
    }
    Ok(adv)
}

/// Discounted return of every step; with a terminal-only reward this is
/// `gamma^(T-1-t) r`.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    out
}
