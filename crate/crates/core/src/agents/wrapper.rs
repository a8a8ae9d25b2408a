use alloc::boxed::Box;
use alloc::string::String;

use super::{AgentPolicy, SimpleAgent};
use crate::engine::{Action, RawObservation};
use crate::filters::{apply_action_filter, JitterCorrector};
use crate::rng::{self, GameRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionSource {
    Policy,
    Expert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    /// Action sent to the engine.
    pub action: Action,
    /// What the policy chose, if it was consulted.
    pub proposed: Option<Action>,
    pub source: DecisionSource,
    /// The action filter replaced the pre-filter action.
    pub filtered: bool,
    pub fallback: bool,
}

impl Decision {
    /// The executed action is not the policy's own choice.
    pub fn intervened(&self) -> bool {
        self.source == DecisionSource::Expert || self.filtered
    }
}

/// Jitter correction followed by the action filter, each optional.
pub struct Postprocessor {
    jitter: Option<JitterCorrector>,
    action_filter: bool,
    expert: SimpleAgent,
    rng: GameRng,
}

impl Postprocessor {
    pub fn new(jitter: bool, action_filter: bool) -> Self {
        Self {
            jitter: jitter.then(JitterCorrector::default),
            action_filter,
            expert: SimpleAgent::new(true),
            rng: rng::seeded(0),
        }
    }

    pub fn jitter_armed(&self) -> bool {
        self.jitter.is_some()
    }

    pub fn action_filter_armed(&self) -> bool {
        self.action_filter
    }

    pub fn takeovers(&self) -> u32 {
        self.jitter.as_ref().map_or(0, |j| j.takeovers)
    }

    pub fn reset(&mut self, seed: u64) {
        if let Some(j) = &mut self.jitter {
            j.reset();
        }
        self.expert.reset(rng::derive_seed(seed, 1));
        self.rng = rng::seeded(rng::derive_seed(seed, 2));
    }

    /// Picks this tick's action. `policy` is only called when the expert is
    /// not in control.
    pub fn decide(
        &mut self,
        obs: &RawObservation,
        policy: impl FnOnce(&RawObservation) -> Action,
    ) -> Decision {
        let expert_turn = match &mut self.jitter {
            Some(j) => j.expert_turn(obs.position),
            None => false,
        };
        let (pre, proposed, source) = if expert_turn {
            (self.expert.decide(obs), None, DecisionSource::Expert)
        } else {
            let a = policy(obs);
            (a, Some(a), DecisionSource::Policy)
        };
        if !self.action_filter {
            return Decision {
                action: pre,
                proposed,
                source,
                filtered: false,
                fallback: false,
            };
        }
        let f = apply_action_filter(obs, pre, &mut self.rng);
        Decision {
            action: f.action,
            proposed,
            source,
            filtered: f.intervened,
            fallback: f.fallback,
        }
    }
}

/// A policy with post-processing, named `<base>_jitter_action` and so on.
pub struct FilteredAgent<P> {
    pub base: P,
    pub post: Postprocessor,
    pub last: Option<Decision>,
}

impl<P: AgentPolicy> FilteredAgent<P> {
    pub fn new(base: P, post: Postprocessor) -> Self {
        Self {
            base,
            post,
            last: None,
        }
    }
}

impl<P: AgentPolicy> AgentPolicy for FilteredAgent<P> {
    fn name(&self) -> String {
        let mut s = self.base.name();
        if self.post.jitter_armed() {
            s.push_str("_jitter");
        }
        if self.post.action_filter_armed() {
            s.push_str("_action");
        }
        s
    }

    fn act(&mut self, obs: &RawObservation) -> Action {
        let base = &mut self.base;
        let d = self.post.decide(obs, |o| base.act(o));
        self.last = Some(d);
        d.action
    }

    fn reset(&mut self, seed: u64) {
        self.base.reset(seed);
        self.post.reset(seed);
        self.last = None;
    }
}

impl<P: AgentPolicy + ?Sized> AgentPolicy for Box<P>
where
    Box<P>: Send,
{
    fn name(&self) -> String {
        (**self).name()
    }
    fn act(&mut self, obs: &RawObservation) -> Action {
        (**self).act(obs)
    }
    fn reset(&mut self, seed: u64) {
        (**self).reset(seed)
    }
}
