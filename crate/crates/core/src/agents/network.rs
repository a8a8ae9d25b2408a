use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::AgentPolicy;
use crate::encoder::{encode_into, TENSOR_LEN};
use crate::engine::{Action, RawObservation};
use crate::nn::{ActionDistribution, Network, Trace};
use crate::rng::{self, GameRng};

/// Plays a policy network: greedy by default, or sampling from the softmax.
pub struct NetworkAgent {
    name: String,
    net: Arc<Network<f32>>,
    sample: bool,
    rng: GameRng,
    input: Vec<f32>,
    trace: Trace<f32>,
}

impl NetworkAgent {
    pub fn new(name: String, net: Arc<Network<f32>>, sample: bool) -> Self {
        let trace = net.new_trace();
        Self {
            name,
            net,
            sample,
            rng: rng::seeded(0),
            input: alloc::vec![0.0; TENSOR_LEN],
            trace,
        }
    }

    pub fn distribution(&mut self, obs: &RawObservation) -> ActionDistribution {
        encode_into(obs, &mut self.input).expect("engine observations are always encodable");
        self.net
            .forward_trace(&self.input, &mut self.trace, None)
            .expect("policy input shape is fixed");
        ActionDistribution::from_logits(&self.trace.output)
    }
}

impl AgentPolicy for NetworkAgent {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn act(&mut self, obs: &RawObservation) -> Action {
        let d = self.distribution(obs);
        if self.sample {
            d.sample(&mut self.rng)
        } else {
            d.argmax()
        }
    }
    fn reset(&mut self, seed: u64) {
        self.rng = rng::seeded(seed);
    }
}
