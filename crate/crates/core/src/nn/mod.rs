//! Small convolutional policy/value networks with hand-written backprop.

mod adam;
mod checkpoint;
mod dist;
mod gradcheck;
mod loss;
mod network;
mod scalar;

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{decode_checkpoint, encode_checkpoint, Checkpoint, CHECKPOINT_MAGIC};
pub use dist::ActionDistribution;
pub use gradcheck::{finite_difference_check, GradCheckReport};
pub use loss::{accumulate_batch, BatchReport, Loss, SampleEval};
pub use network::{ConvSpec, Gradients, Mode, NetSpec, Network, Trace};
pub use scalar::Scalar;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnError {
    #[error("expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("non-finite loss at batch sample {index}: {detail}")]
    NonFiniteLoss { index: usize, detail: String },
    #[error("empty batch")]
    EmptyBatch,
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

#[cfg(test)]
mod tests;
