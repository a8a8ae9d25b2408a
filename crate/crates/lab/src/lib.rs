//! File formats, training drivers and tournaments on top of `pommer-core`.
//!
//! Every artifact carries the hash of the run configuration that produced
//! it: datasets in their header, checkpoints in their provenance string,
//! replays and tables in a `config_hash` field.

pub mod artifacts;
pub mod config;
pub mod curriculum;
pub mod dataset;
pub mod error;
pub mod imitate;
pub mod replay;
pub mod tournament;

pub use error::{LabError, Result};

/// Worker pool with `workers` threads, or one per core.
pub fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(LabError::BadArgs("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| LabError::BadArgs(e.to_string()))
}
