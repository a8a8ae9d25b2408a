use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::engine::Action;
use crate::nn::{
    accumulate_batch, ActionDistribution, Adam, BatchReport, Gradients, Loss, Mode, Network,
};

/// One cross-entropy step on a minibatch of expert decisions, with dropout
/// active. Parameters are left untouched if the loss or gradient is not finite.
pub fn imitation_batch(
    net: &mut Network<f32>,
    opt: &mut Adam,
    inputs: &[&[f32]],
    actions: &[Action],
    rng: &mut dyn RngCore,
) -> Result<BatchReport, TrainError> {
    if inputs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let losses: Vec<Loss> = actions
        .iter()
        .map(|a| Loss::CrossEntropy { action: a.index() })
        .collect();
    let previous = net.mode;
    net.mode = Mode::Train;
    let mut trace = net.new_trace();
    let mut grads = Gradients::zeros(net.param_count());
    let report = accumulate_batch(net, &mut trace, inputs, &losses, &mut grads, Some(rng));
    net.mode = previous;
    let report = report?;
    opt.step(&mut net.params, &grads)?;
    Ok(report)
}

/// Mean cross-entropy and top-1 agreement on held-out decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub samples: usize,
    pub cross_entropy: f64,
    pub top1: f64,
}

/// Evaluates without dropout regardless of the network's mode.
pub fn evaluate_policy(
    net: &Network<f32>,
    inputs: &[&[f32]],
    actions: &[Action],
) -> Result<HoldoutReport, TrainError> {
    if inputs.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut eval = net.clone();
    eval.mode = Mode::Eval;
    let mut trace = eval.new_trace();
    let mut ce = 0.0;
    let mut hits = 0usize;
    for (x, a) in inputs.iter().zip(actions) {
        eval.forward_trace(x, &mut trace, None)?;
        let dist = ActionDistribution::from_logits(&trace.output);
        ce -= dist.log_prob(*a);
        if dist.argmax() == *a {
            hits += 1;
        }
    }
    let n = inputs.len() as f64;
    Ok(HoldoutReport {
        samples: inputs.len(),
        cross_entropy: ce / n,
        top1: hits as f64 / n,
    })
}

/// Frequency of the most common action.
pub fn majority_frequency(actions: &[Action]) -> Option<f64> {
    if actions.is_empty() {
        return None;
    }
    let mut counts = [0usize; 6];
    for a in actions {
        counts[a.index()] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    Some(max as f64 / actions.len() as f64)
}
