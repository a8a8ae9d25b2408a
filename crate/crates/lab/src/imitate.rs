//! Behavioral cloning from a dataset file.
//!
//! Whole datasets do not fit in memory (a SimpleAgent game yields over a
//! thousand records of 9 KB), so training and holdout records are sampled by
//! random access and kept as bytes: every encoded plane holds small integers.

use std::path::Path;

use pommer_core::encoder::TENSOR_LEN;
use pommer_core::engine::Action;
use pommer_core::nn::{Adam, AdamConfig, Mode, Network};
use pommer_core::rng;
use pommer_core::train::{evaluate_policy, imitation_batch, HoldoutReport};
use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::error::{LabError, Result};

/// Records held as one byte per value.
pub struct CompactSet {
    xs: Vec<u8>,
    pub actions: Vec<Action>,
}

impl CompactSet {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    fn expand(&self, i: usize, out: &mut [f32]) {
        for (o, &b) in out
            .iter_mut()
            .zip(&self.xs[i * TENSOR_LEN..(i + 1) * TENSOR_LEN])
        {
            *o = b as f32;
        }
    }

    /// Loads the given records (sorted for sequential reads).
    pub fn load(ds: &mut Dataset, mut indices: Vec<u64>, path: &Path) -> Result<Self> {
        indices.sort_unstable();
        let mut xs = Vec::with_capacity(indices.len() * TENSOR_LEN);
        let mut actions = Vec::with_capacity(indices.len());
        let mut x = vec![0.0f32; TENSOR_LEN];
        for i in indices {
            actions.push(ds.read(i, &mut x)?);
            for &v in &x {
                if v.fract() != 0.0 || !(0.0..=255.0).contains(&v) {
                    return Err(LabError::corrupt(
                        path,
                        format!("record {i}: value {v} is not a small integer"),
                    ));
                }
                xs.push(v as u8);
            }
        }
        Ok(Self { xs, actions })
    }

    /// Tensors as f32 rows, for evaluation.
    pub fn dense(&self) -> Vec<Vec<f32>> {
        (0..self.len())
            .map(|i| {
                let mut v = vec![0.0; TENSOR_LEN];
                self.expand(i, &mut v);
                v
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImitationEval {
    pub step: usize,
    pub train_loss: f64,
    pub holdout: HoldoutReport,
}

#[derive(Clone, Debug)]
pub struct ImitationOutcome {
    /// Parameters with the lowest holdout cross-entropy, in eval mode.
    pub network: Network<f32>,
    pub initial: HoldoutReport,
    pub history: Vec<ImitationEval>,
    pub best_step: usize,
    pub majority_frequency: f64,
    pub train_games: usize,
    pub holdout_games: usize,
    pub train_records: usize,
    pub holdout_records: usize,
}

impl ImitationOutcome {
    pub fn best(&self) -> HoldoutReport {
        self.history
            .iter()
            .find(|e| e.step == self.best_step)
            .map(|e| e.holdout)
            .unwrap_or(self.initial)
    }
}

/// Splits games 90/10 (per `holdout_fraction`), trains with dropout and
/// keeps the best holdout checkpoint.
pub fn train_imitation(
    data: &Path,
    cfg: &RunConfig,
    mut on_eval: impl FnMut(&ImitationEval),
) -> Result<ImitationOutcome> {
    let im = &cfg.imitation;
    let mut ds = Dataset::open(data)?;
    let games = ds.header.game_counts.len();
    if games < 2 {
        return Err(LabError::BadArgs(
            "imitation needs a dataset with at least two games".into(),
        ));
    }
    let mut rng = rng::seeded(rng::derive_seed(cfg.seed, 0x696d_6974));
    let mut order: Vec<usize> = (0..games).collect();
    order.shuffle(&mut rng);
    let n_hold = ((games as f64 * im.holdout_fraction).round() as usize).clamp(1, games - 1);
    let (hold_games, train_games) = order.split_at(n_hold);

    let pick = |games: &[usize], k: usize, rng: &mut rng::GameRng| -> Vec<u64> {
        let ranges: Vec<_> = games.iter().map(|&g| ds.header.game_range(g)).collect();
        let total: u64 = ranges.iter().map(|r| r.end - r.start).sum();
        let k = k.min(total as usize);
        let mut picked: Vec<u64> = index::sample(rng, total as usize, k)
            .into_iter()
            .map(|i| i as u64)
            .collect();
        picked.sort_unstable();
        let mut out = Vec::with_capacity(k);
        let (mut base, mut ri) = (0u64, 0usize);
        for p in picked {
            while p >= base + (ranges[ri].end - ranges[ri].start) {
                base += ranges[ri].end - ranges[ri].start;
                ri += 1;
            }
            out.push(ranges[ri].start + (p - base));
        }
        out
    };
    let train_idx = pick(train_games, im.train_records, &mut rng);
    let hold_idx = pick(hold_games, im.holdout_records, &mut rng);
    if train_idx.is_empty() || hold_idx.is_empty() {
        return Err(LabError::Train(
            pommer_core::train::TrainError::EmptyDataset,
        ));
    }
    let train = CompactSet::load(&mut ds, train_idx, data)?;
    let hold = CompactSet::load(&mut ds, hold_idx, data)?;
    let hold_dense = hold.dense();
    let hold_inputs: Vec<&[f32]> = hold_dense.iter().map(|v| v.as_slice()).collect();

    let spec = cfg.net.spec()?;
    let mut net = Network::new(spec, rng::derive_seed(cfg.seed, 0x6e65_74));
    let mut opt = Adam::new(AdamConfig::with_lr(im.lr), net.param_count());
    let initial = evaluate_policy(&net, &hold_inputs, &hold.actions)?;
    let mut best = (initial.cross_entropy, 0usize, net.params.clone());
    let mut history = Vec::new();

    let mut perm: Vec<usize> = (0..train.len()).collect();
    perm.shuffle(&mut rng);
    let mut cursor = 0;
    let batch = im.batch.min(train.len());
    let mut bufs = vec![vec![0.0f32; TENSOR_LEN]; batch];
    let mut ys = vec![Action::Stop; batch];
    let mut loss_acc = (0.0, 0usize);
    for step in 1..=im.steps {
        for (b, y) in bufs.iter_mut().zip(ys.iter_mut()) {
            if cursor == perm.len() {
                perm.shuffle(&mut rng);
                cursor = 0;
            }
            train.expand(perm[cursor], b);
            *y = train.actions[perm[cursor]];
            cursor += 1;
        }
        let inputs: Vec<&[f32]> = bufs.iter().map(|v| v.as_slice()).collect();
        let r = imitation_batch(&mut net, &mut opt, &inputs, &ys, &mut rng)?;
        loss_acc.0 += r.mean_loss;
        loss_acc.1 += 1;
        if step % im.eval_every == 0 || step == im.steps {
            let holdout = evaluate_policy(&net, &hold_inputs, &hold.actions)?;
            let e = ImitationEval {
                step,
                train_loss: loss_acc.0 / loss_acc.1 as f64,
                holdout,
            };
            loss_acc = (0.0, 0);
            on_eval(&e);
            history.push(e);
            if holdout.cross_entropy < best.0 {
                best = (holdout.cross_entropy, step, net.params.clone());
            }
        }
    }
    let mut network = Network::from_params(net.spec().clone(), best.2, Mode::Eval)?;
    network.mode = Mode::Eval;
    Ok(ImitationOutcome {
        network,
        initial,
        history,
        best_step: best.1,
        majority_frequency: ds.header.majority_frequency().unwrap_or(0.0),
        train_games: train_games.len(),
        holdout_games: hold_games.len(),
        train_records: train.len(),
        holdout_records: hold.len(),
    })
}
