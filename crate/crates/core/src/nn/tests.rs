use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::encoder::TENSOR_LEN;
use crate::engine::Action;
use crate::rng;

fn tiny_spec(outputs: usize) -> NetSpec {
    NetSpec::policy()
        .with_widths(&[2, 2, 2], 8)
        .value_twin()
        .tap(|s| s.outputs = outputs)
}

trait Tap: Sized {
    fn tap(mut self, f: impl FnOnce(&mut Self)) -> Self {
        f(&mut self);
        self
    }
}
impl Tap for NetSpec {}

fn random_inputs(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::seeded(seed);
    (0..n)
        .map(|_| (0..TENSOR_LEN).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
    v.iter().map(|x| x.as_slice()).collect()
}

#[test]
fn zero_params_give_uniform_policy_and_zero_value() {
    let net = Network::<f32>::zeros(NetSpec::policy());
    let x = vec![1.0f32; TENSOR_LEN];
    let d = ActionDistribution::from_logits(&net.forward(&x).unwrap());
    for p in d.probs {
        assert!((p - 1.0 / 6.0).abs() < 1e-12);
    }
    let v = Network::<f32>::zeros(NetSpec::policy().value_twin());
    assert_eq!(v.forward(&x).unwrap(), vec![0.0]);
}

#[test]
fn eval_forward_is_deterministic() {
    let net = Network::<f32>::new(NetSpec::policy(), 11);
    let x: Vec<f32> = random_inputs(1, 3)[0].iter().map(|&v| v as f32).collect();
    assert_eq!(net.forward(&x).unwrap(), net.forward(&x).unwrap());
}

#[test]
fn value_outputs_are_finite_scalars() {
    let spec = NetSpec::policy().with_widths(&[8, 8, 8], 16).value_twin();
    let net = Network::<f32>::new(spec, 5);
    let mut r = rng::seeded(2);
    for _ in 0..1000 {
        let x: Vec<f32> = (0..TENSOR_LEN).map(|_| r.gen_range(0.0..9.0)).collect();
        let out = net.forward(&x).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_finite());
    }
}

#[test]
fn policy_and_value_parameters_are_disjoint() {
    let mut policy = Network::<f32>::new(NetSpec::policy(), 1);
    let value = Network::<f32>::new(NetSpec::policy().value_twin(), 2);
    let x: Vec<f32> = random_inputs(1, 8)[0].iter().map(|&v| v as f32).collect();
    let before = value.forward(&x).unwrap();
    for i in [0, 500, policy.param_count() - 1] {
        policy.params[i] += 0.5;
        assert_eq!(value.forward(&x).unwrap(), before);
    }
}

#[test]
fn dropout_only_in_train_mode_with_rng() {
    let mut net = Network::<f32>::new(NetSpec::policy(), 3);
    let x: Vec<f32> = random_inputs(1, 1)[0].iter().map(|&v| v as f32).collect();
    let eval = net.forward(&x).unwrap();
    net.mode = Mode::Train;
    let mut t = net.new_trace();
    net.forward_trace(&x, &mut t, None).unwrap();
    assert_eq!(t.output, eval);
    let mut r1 = rng::seeded(4);
    net.forward_trace(&x, &mut t, Some(&mut r1)).unwrap();
    let a = t.output.clone();
    assert_ne!(a, eval);
    let mut r2 = rng::seeded(4);
    net.forward_trace(&x, &mut t, Some(&mut r2)).unwrap();
    assert_eq!(t.output, a);
}

fn grad_check(losses: &[Loss], outputs: usize) -> GradCheckReport {
    let net = Network::<f64>::new(tiny_spec(outputs), 21);
    let inputs = random_inputs(losses.len(), 17);
    finite_difference_check(&net, &refs(&inputs), losses, 1e-4).unwrap()
}

#[test]
fn gradient_check_cross_entropy() {
    let losses: Vec<Loss> = (0..4).map(|i| Loss::CrossEntropy { action: i }).collect();
    let r = grad_check(&losses, 6);
    assert!(r.checked > r.skipped_kinks * 10, "{r:?}");
    assert!(r.max_rel_error < 1e-4, "{r:?}");
}

#[test]
fn gradient_check_ppo_clip() {
    // old log-probs near the initial ones so some ratios sit inside the clip range
    let net = Network::<f64>::new(tiny_spec(6), 21);
    let inputs = random_inputs(6, 17);
    let losses: Vec<Loss> = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let d = ActionDistribution::from_logits(&net.forward(x).unwrap());
            let shift = [0.0, 0.003, -0.004, 0.2, -0.3, 0.0][i];
            Loss::PpoClip {
                action: i % 6,
                advantage: if i % 2 == 0 { 1.3 } else { -0.7 },
                old_log_prob: d.log_probs[i % 6] + shift,
                clip: 0.01,
            }
        })
        .collect();
    let r = finite_difference_check(&net, &refs(&inputs), &losses, 1e-4).unwrap();
    assert!(r.max_rel_error < 1e-4, "{r:?}");
}

#[test]
fn gradient_check_squared_error() {
    let losses: Vec<Loss> = [0.7, -1.0, 0.0, 0.25]
        .iter()
        .map(|&t| Loss::SquaredError { target: t })
        .collect();
    let r = grad_check(&losses, 1);
    assert!(r.max_rel_error < 1e-4, "{r:?}");
}

fn batch_grad(net: &Network<f64>, inputs: &[&[f64]], losses: &[Loss]) -> Gradients<f64> {
    let mut g = Gradients::zeros(net.param_count());
    let mut t = net.new_trace();
    accumulate_batch(net, &mut t, inputs, losses, &mut g, None).unwrap();
    g
}

#[test]
fn duplicated_batch_has_same_gradient() {
    let net = Network::<f64>::new(tiny_spec(6), 2);
    let inputs = random_inputs(3, 5);
    let losses: Vec<Loss> = (0..3)
        .map(|i| Loss::CrossEntropy { action: i + 1 })
        .collect();
    let g1 = batch_grad(&net, &refs(&inputs), &losses);
    let doubled: Vec<Vec<f64>> = inputs.iter().chain(&inputs).cloned().collect();
    let doubled_losses: Vec<Loss> = losses.iter().chain(&losses).copied().collect();
    let g2 = batch_grad(&net, &refs(&doubled), &doubled_losses);
    for (a, b) in g1.values.iter().zip(&g2.values) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn zero_advantage_gives_zero_policy_gradient() {
    let net = Network::<f64>::new(tiny_spec(6), 2);
    let inputs = random_inputs(4, 6);
    let losses: Vec<Loss> = (0..4)
        .map(|i| Loss::PpoClip {
            action: i,
            advantage: 0.0,
            old_log_prob: -1.7,
            clip: 0.01,
        })
        .collect();
    let g = batch_grad(&net, &refs(&inputs), &losses);
    assert!(g.values.iter().all(|&v| v == 0.0));
}

#[test]
fn ppo_identity_and_clip_arithmetic() {
    let logits = [0.3f64, -0.2, 0.1, 0.0, 0.5, -1.0];
    let d = ActionDistribution::from_logits(&logits);
    let mut grad = [0.0; 6];
    let adv = [0.4, -1.2, 2.0];
    let mut mean = 0.0;
    for (i, &a) in adv.iter().enumerate() {
        let e = Loss::PpoClip {
            action: i,
            advantage: a,
            old_log_prob: d.log_probs[i],
            clip: 0.01,
        }
        .eval(&logits, &mut grad);
        assert!((e.ratio.unwrap() - 1.0).abs() < 1e-12);
        mean += e.loss / 3.0;
    }
    let mean_adv: f64 = adv.iter().sum::<f64>() / 3.0;
    assert!((mean + mean_adv).abs() < 1e-12);

    // ratio 1.05 with A > 0 is capped at 1.01 A
    let e = Loss::PpoClip {
        action: 0,
        advantage: 2.0,
        old_log_prob: d.log_probs[0] - 1.05f64.ln(),
        clip: 0.01,
    }
    .eval(&logits, &mut grad);
    assert!((e.ratio.unwrap() - 1.05).abs() < 1e-12);
    assert!((-e.loss - 1.01 * 2.0).abs() < 1e-12);
    assert!(e.clipped);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn non_finite_loss_is_rejected_without_accumulating() {
    let net = Network::<f64>::new(tiny_spec(1), 2);
    let inputs = random_inputs(2, 6);
    let losses = [
        Loss::SquaredError { target: 0.0 },
        Loss::SquaredError { target: f64::NAN },
    ];
    let mut g = Gradients::zeros(net.param_count());
    let mut t = net.new_trace();
    let err = accumulate_batch(&net, &mut t, &refs(&inputs), &losses, &mut g, None).unwrap_err();
    assert!(matches!(err, NnError::NonFiniteLoss { index: 1, .. }));
    assert!(g.values.iter().all(|&v| v == 0.0));
}

#[test]
fn adam_examples() {
    let mut w = vec![1.0f64];
    let mut opt = Adam::new(AdamConfig::with_lr(1e-3), 1);
    let zero = Gradients::zeros(1);
    opt.step(&mut w, &zero).unwrap();
    assert_eq!(w, vec![1.0]);

    let mut g = Gradients::zeros(1);
    g.values[0] = 2.0 * w[0];
    opt.step(&mut w, &g).unwrap();
    assert!(w[0].abs() < 1.0);

    g.values[0] = f64::INFINITY;
    assert_eq!(opt.step(&mut w, &g), Err(NnError::NonFinite("gradient")));

    let run = || {
        let mut w = vec![1.0f64, -2.0];
        let mut opt = Adam::new(AdamConfig::default(), 2);
        for _ in 0..50 {
            let mut g = Gradients::zeros(2);
            g.values = w.iter().map(|v| 2.0 * v).collect();
            opt.step(&mut w, &g).unwrap();
        }
        w
    };
    assert_eq!(run(), run());
}

#[test]
fn checkpoint_round_trip_is_bit_identical() {
    let spec = NetSpec::policy().with_widths(&[4, 4, 4], 8);
    let ckpt = Checkpoint {
        provenance: "abc123".into(),
        network: Network::new(spec, 9),
    };
    let bytes = encode_checkpoint(&ckpt);
    let back = decode_checkpoint(&bytes).unwrap();
    assert_eq!(back, ckpt);
    assert_eq!(encode_checkpoint(&back), bytes);
    let x: Vec<f32> = random_inputs(1, 1)[0].iter().map(|&v| v as f32).collect();
    let a = ckpt.network.forward(&x).unwrap();
    let b = back.network.forward(&x).unwrap();
    assert_eq!(
        a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(decode_checkpoint(&bad).is_err());
    assert!(decode_checkpoint(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn distribution_sampling_follows_probs() {
    let d = ActionDistribution::from_logits(&[0.0f64, 1.0, 2.0, -5.0, 0.5, 0.0]);
    let mut r = rng::seeded(1);
    let mut counts = [0usize; 6];
    for _ in 0..60_000 {
        counts[d.sample(&mut r).index()] += 1;
    }
    for i in 0..6 {
        let f = counts[i] as f64 / 60_000.0;
        assert!((f - d.probs[i]).abs() < 0.01);
    }
    assert_eq!(d.argmax(), Action::ALL[2]);
    assert!(d.kl(&d).abs() < 1e-15);
}

proptest! {
    #[test]
    fn softmax_normalized(logits in prop::array::uniform6(-200.0f64..200.0)) {
        let d = ActionDistribution::from_logits(&logits);
        let s: f64 = d.probs.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-6);
        prop_assert!(d.probs.iter().all(|&p| p >= 0.0));
    }
}
