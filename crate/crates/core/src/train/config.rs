use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::nn::AdamConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoConfig {
    pub clip: f64,
    pub minibatch: usize,
    pub epochs: usize,
    pub gamma: f64,
    pub lambda: f64,
    /// Policy updates stop for the rest of a wave once the sample KL
    /// estimate of a minibatch exceeds this.
    pub kl_stop: f64,
    pub entropy_coef: f64,
    pub policy_lr: f64,
    pub value_lr: f64,
    pub normalize_advantages: bool,
    /// Complete games collected before each update.
    pub games_per_update: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip: 0.01,
            minibatch: 128,
            epochs: 4,
            gamma: 0.99,
            lambda: 0.95,
            kl_stop: 0.01,
            entropy_coef: 0.0,
            policy_lr: 2.5e-4,
            value_lr: 1e-3,
            normalize_advantages: true,
            games_per_update: 4,
        }
    }
}

impl PpoConfig {
    pub fn policy_adam(&self) -> AdamConfig {
        AdamConfig::with_lr(self.policy_lr)
    }

    pub fn value_adam(&self) -> AdamConfig {
        AdamConfig::with_lr(self.value_lr)
    }
}

/// One block of training games against a fixed opponent type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub opponent: String,
    /// Game count before scaling.
    pub games: u64,
    /// Only the value network learns.
    pub policy_frozen: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurriculumConfig {
    pub scale: f64,
    pub phases: Vec<Phase>,
    pub ppo: PpoConfig,
    pub p_jitter: f64,
    pub p_action: f64,
    /// The learner's teammate bombs itself at the start of every game.
    pub teammate_suicide: bool,
    /// Enemy-count reward instead of the plain win/loss result.
    pub shaped_reward: bool,
}

impl Default for CurriculumConfig {
    fn default() -> Self {
        let phase = |opponent: &str, games, policy_frozen| Phase {
            opponent: opponent.into(),
            games,
            policy_frozen,
        };
        Self {
            scale: 1.0,
            phases: vec![
                phase("SimpleAgent", 10_000, true),
                phase("StaticAgent", 10_000, false),
                phase("SimpleAgent_NoBomb", 20_000, false),
                phase("SimpleAgent", 60_000, false),
            ],
            ppo: PpoConfig::default(),
            p_jitter: 0.10,
            p_action: 0.30,
            teammate_suicide: true,
            shaped_reward: true,
        }
    }
}

impl CurriculumConfig {
    /// Plain PPO from the imitation weights: one phase against SimpleAgent
    /// as long as the whole curriculum, teammate active, win/loss rewards, no
    /// filters.
    pub fn cautious() -> Self {
        let base = Self::default();
        let total = base.phases.iter().map(|p| p.games).sum();
        Self {
            phases: vec![Phase {
                opponent: "SimpleAgent".into(),
                games: total,
                policy_frozen: false,
            }],
            p_jitter: 0.0,
            p_action: 0.0,
            teammate_suicide: false,
            shaped_reward: false,
            ..base
        }
    }

    /// Games actually played in phase `i`.
    pub fn phase_games(&self, i: usize) -> u64 {
        let g = self.phases[i].games as f64 * self.scale;
        // round half away from zero, then at least one game
        let rounded = num_traits::Float::round(g) as u64;
        rounded.max(1)
    }

    pub fn total_games(&self) -> u64 {
        (0..self.phases.len()).map(|i| self.phase_games(i)).sum()
    }

    /// Phase of the `game_index`-th training game (0-based, global).
    pub fn phase_of(&self, game_index: u64) -> Option<usize> {
        let mut end = 0;
        for i in 0..self.phases.len() {
            end += self.phase_games(i);
            if game_index < end {
                return Some(i);
            }
        }
        None
    }

    /// First global game index of phase `i`.
    pub fn phase_start(&self, i: usize) -> u64 {
        (0..i).map(|j| self.phase_games(j)).sum()
    }
}
