//! Core of the Pommerman team-mode workbench: a deterministic engine, the
//! 19-plane observation encoder, scripted agents, the jitter and action
//! filters, a small CNN with hand-written gradients, and the learning and
//! evaluation arithmetic built on top of them.
//!
//! The crate is `no_std` (it needs `alloc`); enable the `std` feature for
//! runtime SIMD detection in the matrix kernels.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod agents;
pub mod encoder;
pub mod engine;
pub mod eval;
pub mod filters;
pub mod hazard;
pub mod nn;
pub mod rng;
pub mod train;
