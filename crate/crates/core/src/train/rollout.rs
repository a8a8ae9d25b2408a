use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{raw_reward, shaped_reward, TrainError, Trajectory, TrajectoryMeta, Transition};
use crate::agents::{AgentPolicy, AgentSpec, Postprocessor, SimpleAgent, TeammateSuicide};
use crate::encoder::{encode_into, TENSOR_LEN};
use crate::engine::{generate_board, team_of, Action, NUM_AGENTS};
use crate::eval::{agent_seed, opponent_slots, rotation};
use crate::filters::probabilistic_arming;
use crate::nn::{ActionDistribution, Network};
use crate::rng;

/// Per-game line of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameLog {
    pub game_index: u64,
    pub phase: usize,
    pub opponent: String,
    pub seed: u64,
    pub jitter_armed: bool,
    pub action_armed: bool,
    pub reward: f64,
    pub length: u32,
    pub learner_steps: usize,
    pub interventions: usize,
    /// Tick after which the learner's teammate was first seen dead.
    pub teammate_death: Option<u32>,
}

/// Everything a training game needs besides its index.
#[derive(Clone, Copy)]
pub struct RolloutOptions<'a> {
    pub policy: &'a Network<f32>,
    pub value: &'a Network<f32>,
    pub opponent: &'a str,
    pub teammate_suicide: bool,
    pub shaped_reward: bool,
    pub p_jitter: f64,
    pub p_action: f64,
    pub base_seed: u64,
}

/// Seed of training game `game_index`.
pub fn training_seed(base_seed: u64, game_index: u64) -> u64 {
    rng::derive_seed(base_seed ^ 0x7472_6169_6e00_0000, game_index)
}

/// Filter arming of training game `game_index`: (jitter, action filter).
pub fn training_arming(
    base_seed: u64,
    game_index: u64,
    p_jitter: f64,
    p_action: f64,
) -> (bool, bool) {
    let seed = training_seed(base_seed, game_index);
    let mut arming_rng = rng::seeded(rng::derive_seed(seed, 1));
    probabilistic_arming(&mut arming_rng, p_jitter, p_action)
}

/// Plays one training game with a sampling learner seated by rotation.
/// Every random choice derives from `(base_seed, game_index)`.
pub fn play_training_game(
    opts: &RolloutOptions<'_>,
    game_index: u64,
    phase: usize,
) -> Result<(Trajectory, GameLog), TrainError> {
    let seed = training_seed(opts.base_seed, game_index);
    let mut sample_rng = rng::seeded(rng::derive_seed(seed, 2));
    let (jitter_armed, action_armed) =
        training_arming(opts.base_seed, game_index, opts.p_jitter, opts.p_action);

    let [learner, mate] = rotation(game_index);
    let opp = opponent_slots(game_index);
    let spec = AgentSpec::parse(opts.opponent).map_err(|e| TrainError::Agent(e.to_string()))?;
    let mut seats: [Option<Box<dyn AgentPolicy>>; NUM_AGENTS] = [None, None, None, None];
    for &o in &opp {
        let agent = spec
            .build(None, false)
            .map_err(|e| TrainError::Agent(e.to_string()))?;
        seats[o] = Some(agent);
    }
    seats[mate] = Some(if opts.teammate_suicide {
        Box::new(TeammateSuicide::default())
    } else {
        Box::new(SimpleAgent::new(true))
    });
    for (slot, s) in seats.iter_mut().enumerate() {
        if let Some(a) = s {
            a.reset(agent_seed(seed, slot));
        }
    }
    let mut post = Postprocessor::new(jitter_armed, action_armed);
    post.reset(agent_seed(seed, learner));

    let mut state = generate_board(seed);
    let mut ptrace = opts.policy.new_trace();
    let mut vtrace = opts.value.new_trace();
    let mut steps: Vec<Transition> = Vec::new();
    let mut input = alloc::vec![0.0f32; TENSOR_LEN];
    let mut teammate_death = None;
    loop {
        let mut actions = [Action::Stop; NUM_AGENTS];
        for slot in 0..NUM_AGENTS {
            let Ok(obs) = state.observe(slot) else {
                continue;
            };
            if slot == learner {
                encode_into(&obs, &mut input).expect("engine observations encode");
                opts.policy.forward_trace(&input, &mut ptrace, None)?;
                opts.value.forward_trace(&input, &mut vtrace, None)?;
                let dist = ActionDistribution::from_logits(&ptrace.output);
                let value = vtrace.output[0] as f64;
                let d = post.decide(&obs, |_| dist.sample(&mut sample_rng));
                steps.push(Transition {
                    obs: input.clone(),
                    action: d.action,
                    log_prob: dist.log_prob(d.action),
                    value,
                    intervened: d.intervened(),
                });
                actions[slot] = d.action;
            } else if let Some(agent) = &mut seats[slot] {
                actions[slot] = agent.act(&obs);
            }
        }
        let events = state.step_mut(actions).expect("loop stops at the end");
        if teammate_death.is_none() && !state.agents[mate].alive {
            teammate_death = Some(state.tick);
        }
        if events.outcome.is_some() {
            break;
        }
    }
    let team = team_of(learner);
    let reward = if opts.shaped_reward {
        shaped_reward(&state, team)?
    } else {
        raw_reward(&state, team)?
    };
    let interventions = steps.iter().filter(|s| s.intervened).count();
    let log = GameLog {
        game_index,
        phase,
        opponent: opts.opponent.into(),
        seed,
        jitter_armed,
        action_armed,
        reward,
        length: state.tick,
        learner_steps: steps.len(),
        interventions,
        teammate_death,
    };
    let traj = Trajectory {
        steps,
        reward,
        meta: TrajectoryMeta {
            game_index,
            seed,
            opponent: opts.opponent.into(),
            jitter_armed,
            action_armed,
        },
    };
    Ok((traj, log))
}
