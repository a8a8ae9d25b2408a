use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{discounted_returns, gae, normalize_advantages, PpoConfig, TrainError, Trajectory};
use crate::nn::{accumulate_batch, Adam, Gradients, Loss, Mode, Network};
use crate::rng;

/// Policy and value networks with their optimizers.
#[derive(Clone, Debug, PartialEq)]
pub struct PpoLearner {
    pub policy: Network<f32>,
    pub value: Network<f32>,
    pub policy_opt: Adam,
    pub value_opt: Adam,
    pub updates: u64,
}

/// Per-update line of the training log.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub update_index: u64,
    pub transitions: usize,
    /// Transitions whose action the policy chose itself.
    pub policy_samples: usize,
    /// Transitions kept out of the policy loss because a filter or the
    /// expert picked the action.
    pub excluded_samples: usize,
    pub policy_minibatches: usize,
    pub value_minibatches: usize,
    /// Mean KL estimate over the policy minibatches, measured before each step.
    pub kl: f64,
    pub clip_fraction: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Largest `|ratio - 1|` in the first minibatch, before any step.
    pub first_ratio_deviation: f64,
    pub early_stopped: bool,
    pub policy_frozen: bool,
}

struct Sample<'a> {
    obs: &'a [f32],
    action: usize,
    log_prob: f64,
    intervened: bool,
    advantage: f64,
    ret: f64,
}

impl PpoLearner {
    /// Networks are switched to eval mode: no dropout while doing PPO.
    pub fn new(mut policy: Network<f32>, mut value: Network<f32>, cfg: &PpoConfig) -> Self {
        policy.mode = Mode::Eval;
        value.mode = Mode::Eval;
        let policy_opt = Adam::new(cfg.policy_adam(), policy.param_count());
        let value_opt = Adam::new(cfg.value_adam(), value.param_count());
        Self {
            policy,
            value,
            policy_opt,
            value_opt,
            updates: 0,
        }
    }

    /// One PPO update over a wave of complete games. On any non-finite loss
    /// or gradient the learner is restored to its state before the call.
    pub fn update(
        &mut self,
        trajectories: &[Trajectory],
        cfg: &PpoConfig,
        freeze_policy: bool,
        seed: u64,
    ) -> Result<UpdateStats, TrainError> {
        if cfg.entropy_coef != 0.0 {
            return Err(TrainError::Agent("entropy bonus is not supported".into()));
        }
        let snapshot = self.clone();
        let result = self.update_inner(trajectories, cfg, freeze_policy, seed);
        if result.is_err() {
            *self = snapshot;
        }
        result
    }

    fn update_inner(
        &mut self,
        trajectories: &[Trajectory],
        cfg: &PpoConfig,
        freeze_policy: bool,
        seed: u64,
    ) -> Result<UpdateStats, TrainError> {
        let mut samples: Vec<Sample<'_>> = Vec::new();
        for traj in trajectories {
            let rewards = traj.rewards();
            let adv = gae(&rewards, &traj.values(), cfg.gamma, cfg.lambda)?;
            let ret = discounted_returns(&rewards, cfg.gamma);
            for (i, s) in traj.steps.iter().enumerate() {
                samples.push(Sample {
                    obs: &s.obs,
                    action: s.action.index(),
                    log_prob: s.log_prob,
                    intervened: s.intervened,
                    advantage: adv[i],
                    ret: ret[i],
                });
            }
        }
        if samples.is_empty() {
            return Err(TrainError::EmptyTrajectory);
        }
        if cfg.normalize_advantages {
            let mut adv: Vec<f64> = samples
                .iter()
                .filter(|s| !s.intervened)
                .map(|s| s.advantage)
                .collect();
            normalize_advantages(&mut adv);
            let mut it = adv.into_iter();
            for s in samples.iter_mut().filter(|s| !s.intervened) {
                s.advantage = it.next().expect("same count");
            }
        }

        let mut stats = UpdateStats {
            update_index: self.updates,
            transitions: samples.len(),
            policy_samples: samples.iter().filter(|s| !s.intervened).count(),
            excluded_samples: samples.iter().filter(|s| s.intervened).count(),
            policy_frozen: freeze_policy,
            ..Default::default()
        };
        let mut rng = rng::seeded(rng::derive_seed(seed, self.updates));
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut pgrad = Gradients::zeros(self.policy.param_count());
        let mut vgrad = Gradients::zeros(self.value.param_count());
        let mut ptrace = self.policy.new_trace();
        let mut vtrace = self.value.new_trace();
        let mut policy_active = !freeze_policy;
        let mut first = true;
        let batch = cfg.minibatch.max(1);

        for _epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                let inputs: Vec<&[f32]> = chunk.iter().map(|&i| samples[i].obs).collect();
                let losses: Vec<Loss> = chunk
                    .iter()
                    .map(|&i| Loss::SquaredError {
                        target: samples[i].ret,
                    })
                    .collect();
                vgrad.reset();
                let r =
                    accumulate_batch(&self.value, &mut vtrace, &inputs, &losses, &mut vgrad, None)?;
                self.value_opt.step(&mut self.value.params, &vgrad)?;
                stats.value_loss += r.mean_loss;
                stats.value_minibatches += 1;

                if !policy_active {
                    continue;
                }
                let chosen: Vec<usize> = chunk
                    .iter()
                    .copied()
                    .filter(|&i| !samples[i].intervened)
                    .collect();
                if chosen.is_empty() {
                    continue;
                }
                let inputs: Vec<&[f32]> = chosen.iter().map(|&i| samples[i].obs).collect();
                let losses: Vec<Loss> = chosen
                    .iter()
                    .map(|&i| Loss::PpoClip {
                        action: samples[i].action,
                        advantage: samples[i].advantage,
                        old_log_prob: samples[i].log_prob,
                        clip: cfg.clip,
                    })
                    .collect();
                pgrad.reset();
                let r = accumulate_batch(
                    &self.policy,
                    &mut ptrace,
                    &inputs,
                    &losses,
                    &mut pgrad,
                    None,
                )?;
                if first {
                    stats.first_ratio_deviation = r.max_ratio_deviation;
                    first = false;
                }
                stats.kl += r.approx_kl;
                stats.clip_fraction += r.clip_fraction;
                stats.policy_loss += r.mean_loss;
                stats.policy_minibatches += 1;
                if r.approx_kl > cfg.kl_stop {
                    stats.early_stopped = true;
                    policy_active = false;
                    continue;
                }
                self.policy_opt.step(&mut self.policy.params, &pgrad)?;
            }
        }
        if stats.policy_minibatches > 0 {
            let n = stats.policy_minibatches as f64;
            stats.kl /= n;
            stats.clip_fraction /= n;
            stats.policy_loss /= n;
        }
        if stats.value_minibatches > 0 {
            stats.value_loss /= stats.value_minibatches as f64;
        }
        self.updates += 1;
        Ok(stats)
    }
}
