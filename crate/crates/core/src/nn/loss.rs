use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::RngCore;

use super::{ActionDistribution, Gradients, Network, NnError, Scalar, Trace};
use crate::engine::Action;

/// Per-sample loss on the raw network outputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Loss {
    /// `-log p(action)` under the softmax of the logits.
    CrossEntropy { action: usize },
    /// Negated clipped surrogate `-min(r A, clip(r, 1-c, 1+c) A)` with
    /// `r = p(action) / exp(old_log_prob)`.
    PpoClip {
        action: usize,
        advantage: f64,
        old_log_prob: f64,
        clip: f64,
    },
    /// `(v - target)^2` on a single output.
    SquaredError { target: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleEval {
    pub loss: f64,
    pub ratio: Option<f64>,
    pub clipped: bool,
}

impl Loss {
    /// Loss value and its gradient with respect to `output`, written to `d`.
    pub fn eval<F: Scalar>(&self, output: &[F], d: &mut [F]) -> SampleEval {
        match *self {
            Loss::CrossEntropy { action } => {
                let dist = ActionDistribution::from_logits(output);
                for i in 0..Action::COUNT {
                    let onehot = if i == action { 1.0 } else { 0.0 };
                    d[i] = F::of(dist.probs[i] - onehot);
                }
                SampleEval {
                    loss: -dist.log_probs[action],
                    ..Default::default()
                }
            }
            Loss::PpoClip {
                action,
                advantage,
                old_log_prob,
                clip,
            } => {
                let dist = ActionDistribution::from_logits(output);
                let ratio = Float::exp(dist.log_probs[action] - old_log_prob);
                let clipped_ratio = ratio.clamp(1.0 - clip, 1.0 + clip);
                let unclipped = ratio * advantage;
                let bounded = clipped_ratio * advantage;
                let clipped = bounded < unclipped;
                if clipped {
                    d[..Action::COUNT].fill(F::zero());
                } else {
                    // d(-r A)/dz_i = -A r (onehot_i - p_i)
                    for i in 0..Action::COUNT {
                        let onehot = if i == action { 1.0 } else { 0.0 };
                        d[i] = F::of(-advantage * ratio * (onehot - dist.probs[i]));
                    }
                }
                SampleEval {
                    loss: -unclipped.min(bounded),
                    ratio: Some(ratio),
                    clipped,
                }
            }
            Loss::SquaredError { target } => {
                let v = output[0].as_f64();
                d[0] = F::of(2.0 * (v - target));
                SampleEval {
                    loss: (v - target) * (v - target),
                    ..Default::default()
                }
            }
        }
    }
}

/// Aggregate statistics of one batch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BatchReport {
    pub samples: usize,
    pub mean_loss: f64,
    /// Fraction of PPO samples whose clipped term was the active minimum.
    pub clip_fraction: f64,
    /// Sample estimate of KL(old || new): mean of `(r - 1) - ln r`.
    pub approx_kl: f64,
    /// Largest `|r - 1|` seen.
    pub max_ratio_deviation: f64,
}

/// Adds the gradient of the mean batch loss to `grads`. On a non-finite
/// loss nothing is accumulated and the offending sample is reported.
pub fn accumulate_batch<F: Scalar>(
    net: &Network<F>,
    trace: &mut Trace<F>,
    inputs: &[&[F]],
    losses: &[Loss],
    grads: &mut Gradients<F>,
    mut dropout_rng: Option<&mut (dyn RngCore + '_)>,
) -> Result<BatchReport, NnError> {
    if inputs.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    assert_eq!(inputs.len(), losses.len(), "one loss per input");
    if grads.values.len() != net.param_count() {
        return Err(NnError::ShapeMismatch {
            expected: net.param_count(),
            got: grads.values.len(),
        });
    }
    let n = inputs.len();
    let scale = F::of(1.0 / n as f64);
    let mut staged = Gradients::zeros(grads.values.len());
    let mut d: Vec<F> = alloc::vec![F::zero(); net.spec().outputs];
    let mut report = BatchReport {
        samples: n,
        ..Default::default()
    };
    let mut ppo = 0usize;
    let mut clipped = 0usize;
    for (i, (x, loss)) in inputs.iter().zip(losses).enumerate() {
        net.forward_trace(x, trace, dropout_rng.as_deref_mut())?;
        let e = loss.eval(&trace.output, &mut d);
        if !e.loss.is_finite() || d.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFiniteLoss {
                index: i,
                detail: format!(
                    "{loss:?} gave loss {} on outputs {:?}",
                    e.loss, trace.output
                ),
            });
        }
        report.mean_loss += e.loss;
        if let Some(r) = e.ratio {
            ppo += 1;
            clipped += e.clipped as usize;
            report.approx_kl += (r - 1.0) - Float::ln(r);
            report.max_ratio_deviation = report.max_ratio_deviation.max((r - 1.0).abs());
        }
        for v in &mut d {
            *v = *v * scale;
        }
        net.backward_trace(x, trace, &d, &mut staged);
    }
    report.mean_loss /= n as f64;
    if ppo > 0 {
        report.clip_fraction = clipped as f64 / ppo as f64;
        report.approx_kl /= ppo as f64;
    }
    for (g, s) in grads.values.iter_mut().zip(&staged.values) {
        *g = *g + *s;
    }
    grads.count += n;
    Ok(report)
}
