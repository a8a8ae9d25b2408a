//! Agent interface, scripted agents, network-driven agents and the filter
//! wrapper.

mod network;
mod scripted;
mod wrapper;

pub use network::NetworkAgent;
pub use scripted::{RandomAgent, SimpleAgent, StaticAgent, TeammateSuicide};
pub use wrapper::{Decision, DecisionSource, FilteredAgent, Postprocessor};

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;

use crate::engine::{Action, RawObservation};
use crate::nn::Network;

/// Anything that can play one agent slot.
pub trait AgentPolicy: Send {
    fn name(&self) -> String;
    fn act(&mut self, obs: &RawObservation) -> Action;
    /// Called before every game with the agent's seed for that game.
    fn reset(&mut self, seed: u64);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseAgent {
    Static,
    Simple,
    SimpleNoBomb,
    Random,
    /// A network policy, named like "Imitation" or "PPO".
    Network(String),
}

/// A parsed agent name: a base agent plus optional post-processing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentSpec {
    pub base: BaseAgent,
    pub jitter: bool,
    pub action_filter: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AgentError {
    #[error("unknown agent name {0:?}")]
    Unknown(String),
    #[error("agent {0:?} needs network weights")]
    MissingNetwork(String),
}

pub const NETWORK_NAMES: [&str; 5] = [
    "Imitation",
    "PPO",
    "PPOAgent",
    "PPOAgent_Cautious",
    "Network",
];

impl AgentSpec {
    /// Parses names such as `SimpleAgent_NoBomb_action`, `Imitation_Vanilla`
    /// or `PPO_jitter_action`.
    pub fn parse(name: &str) -> Result<Self, AgentError> {
        let mut rest = name;
        let mut jitter = false;
        let mut action_filter = false;
        let mut vanilla = false;
        loop {
            if let Some(r) = rest.strip_suffix("_action") {
                action_filter = true;
                rest = r;
            } else if let Some(r) = rest.strip_suffix("_jitter") {
                jitter = true;
                rest = r;
            } else if let Some(r) = rest.strip_suffix("_Vanilla") {
                vanilla = true;
                rest = r;
            } else {
                break;
            }
        }
        if vanilla && (jitter || action_filter) {
            return Err(AgentError::Unknown(name.to_string()));
        }
        let base = match rest {
            "StaticAgent" => BaseAgent::Static,
            "SimpleAgent" => BaseAgent::Simple,
            "SimpleAgent_NoBomb" => BaseAgent::SimpleNoBomb,
            "RandomAgent" => BaseAgent::Random,
            n if NETWORK_NAMES.contains(&n) => BaseAgent::Network(n.to_string()),
            _ => return Err(AgentError::Unknown(name.to_string())),
        };
        Ok(Self {
            base,
            jitter,
            action_filter,
        })
    }

    pub fn base_name(&self) -> String {
        match &self.base {
            BaseAgent::Static => "StaticAgent".into(),
            BaseAgent::Simple => "SimpleAgent".into(),
            BaseAgent::SimpleNoBomb => "SimpleAgent_NoBomb".into(),
            BaseAgent::Random => "RandomAgent".into(),
            BaseAgent::Network(n) => n.clone(),
        }
    }

    /// Canonical name: base plus `_jitter` and/or `_action`.
    pub fn name(&self) -> String {
        let mut s = self.base_name();
        if self.jitter {
            s.push_str("_jitter");
        }
        if self.action_filter {
            s.push_str("_action");
        }
        s
    }

    pub fn needs_network(&self) -> bool {
        matches!(self.base, BaseAgent::Network(_))
    }

    /// Builds the agent. Network agents play greedily unless `sample` is set.
    pub fn build(
        &self,
        network: Option<Arc<Network<f32>>>,
        sample: bool,
    ) -> Result<Box<dyn AgentPolicy>, AgentError> {
        let base: Box<dyn AgentPolicy> = match &self.base {
            BaseAgent::Static => Box::new(StaticAgent),
            BaseAgent::Simple => Box::new(SimpleAgent::new(true)),
            BaseAgent::SimpleNoBomb => Box::new(SimpleAgent::new(false)),
            BaseAgent::Random => Box::new(RandomAgent::new()),
            BaseAgent::Network(n) => {
                let net = network.ok_or_else(|| AgentError::MissingNetwork(n.clone()))?;
                Box::new(NetworkAgent::new(n.clone(), net, sample))
            }
        };
        if !self.jitter && !self.action_filter {
            return Ok(base);
        }
        let post = Postprocessor::new(self.jitter, self.action_filter);
        Ok(Box::new(FilteredAgent::new(base, post)))
    }
}
