use rand::Rng;

use super::Scalar;
use crate::engine::Action;

/// Softmax over the six action logits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionDistribution {
    pub probs: [f64; Action::COUNT],
    pub log_probs: [f64; Action::COUNT],
}

impl ActionDistribution {
    pub fn from_logits<F: Scalar>(logits: &[F]) -> Self {
        assert_eq!(
            logits.len(),
            Action::COUNT,
            "policy head must have 6 outputs"
        );
        let l: [f64; Action::COUNT] = core::array::from_fn(|i| logits[i].as_f64());
        let max = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = l.iter().map(|&v| libm_exp(v - max)).sum();
        let log_z = max + libm_log(sum);
        let log_probs = l.map(|v| v - log_z);
        let probs = log_probs.map(libm_exp);
        Self { probs, log_probs }
    }

    pub fn uniform() -> Self {
        Self::from_logits(&[0.0f64; Action::COUNT])
    }

    #[inline]
    pub fn prob(&self, a: Action) -> f64 {
        self.probs[a.index()]
    }

    #[inline]
    pub fn log_prob(&self, a: Action) -> f64 {
        self.log_probs[a.index()]
    }

    /// Most likely action; the lowest index wins ties.
    pub fn argmax(&self) -> Action {
        let mut best = 0;
        for i in 1..Action::COUNT {
            if self.probs[i] > self.probs[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for i in 0..Action::COUNT {
            acc += self.probs[i];
            if u < acc {
                return Action::ALL[i];
            }
        }
        // rounding left a sliver above the last cumulative sum
        Action::ALL[(0..Action::COUNT)
            .rev()
            .find(|&i| self.probs[i] > 0.0)
            .unwrap_or(0)]
    }

    /// KL(self || other).
    pub fn kl(&self, other: &Self) -> f64 {
        (0..Action::COUNT)
            .filter(|&i| self.probs[i] > 0.0)
            .map(|i| self.probs[i] * (self.log_probs[i] - other.log_probs[i]))
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        -(0..Action::COUNT)
            .filter(|&i| self.probs[i] > 0.0)
            .map(|i| self.probs[i] * self.log_probs[i])
            .sum::<f64>()
    }
}

#[inline]
fn libm_exp(v: f64) -> f64 {
    num_traits::Float::exp(v)
}

#[inline]
fn libm_log(v: f64) -> f64 {
    num_traits::Float::ln(v)
}
