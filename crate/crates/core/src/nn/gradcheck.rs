use alloc::vec::Vec;

use super::{accumulate_batch, Gradients, Loss, Network, NnError};

/// Outcome of comparing backprop against central differences.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    /// Coordinates skipped because the perturbation crossed a ReLU, pooling
    /// or clipping boundary, where the loss is not differentiable.
    pub skipped_kinks: usize,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
}

fn batch_loss(
    net: &Network<f64>,
    inputs: &[&[f64]],
    losses: &[Loss],
    patterns: &mut Vec<u64>,
) -> Result<f64, NnError> {
    let mut trace = net.new_trace();
    let mut d = alloc::vec![0.0; net.spec().outputs];
    let mut total = 0.0;
    patterns.clear();
    for (x, loss) in inputs.iter().zip(losses) {
        net.forward_trace(x, &mut trace, None)?;
        let e = loss.eval(&trace.output, &mut d);
        // the clipped/unclipped switch is a kink of the surrogate too
        patterns.push(trace.pattern_digest() ^ e.clipped as u64);
        total += e.loss;
    }
    Ok(total / inputs.len() as f64)
}

/// Central-difference check of the mean batch loss gradient over every
/// parameter, in eval mode. Relative error is `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn finite_difference_check(
    net: &Network<f64>,
    inputs: &[&[f64]],
    losses: &[Loss],
    eps: f64,
) -> Result<GradCheckReport, NnError> {
    let mut grads = Gradients::zeros(net.param_count());
    let mut trace = net.new_trace();
    accumulate_batch(net, &mut trace, inputs, losses, &mut grads, None)?;

    let mut probe = net.clone();
    let mut base = Vec::new();
    let mut plus_pat = Vec::new();
    let mut minus_pat = Vec::new();
    batch_loss(&probe, inputs, losses, &mut base)?;
    let mut report = GradCheckReport::default();
    for i in 0..net.param_count() {
        let w = net.params[i];
        probe.params[i] = w + eps;
        let plus = batch_loss(&probe, inputs, losses, &mut plus_pat)?;
        probe.params[i] = w - eps;
        let minus = batch_loss(&probe, inputs, losses, &mut minus_pat)?;
        probe.params[i] = w;
        if plus_pat != base || minus_pat != base {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * eps);
        let analytic = grads.values[i];
        let abs = (numeric - analytic).abs();
        let rel = abs / analytic.abs().max(numeric.abs()).max(1e-8);
        report.checked += 1;
        report.max_abs_error = report.max_abs_error.max(abs);
        report.max_rel_error = report.max_rel_error.max(rel);
    }
    Ok(report)
}
