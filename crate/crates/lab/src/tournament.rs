//! Team-vs-team tournaments with side rotation.

use std::sync::Arc;

use pommer_core::agents::{AgentPolicy, AgentSpec};
use pommer_core::eval::{run_match, MatchOutcome, MatchResult, WltRow};
use pommer_core::nn::Network;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{LabError, Result};

/// A resolvable agent: its name and, for network agents, the weights.
#[derive(Clone)]
pub struct Entrant {
    pub spec: AgentSpec,
    pub network: Option<Arc<Network<f32>>>,
}

impl Entrant {
    pub fn new(name: &str, network: Option<Arc<Network<f32>>>) -> Result<Self> {
        let spec = AgentSpec::parse(name)?;
        if spec.needs_network() && network.is_none() {
            return Err(LabError::BadArgs(format!("{name} needs a checkpoint")));
        }
        Ok(Self { spec, network })
    }

    pub fn name(&self) -> String {
        self.spec.name()
    }

    fn build(&self) -> Result<Box<dyn AgentPolicy>> {
        Ok(self.spec.build(self.network.clone(), false)?)
    }
}

/// Plays game `game_index` between two teams of two copies each.
pub fn play(
    learner: &Entrant,
    opponent: &Entrant,
    base_seed: u64,
    game_index: u64,
) -> Result<MatchResult> {
    let (mut a0, mut a1) = (learner.build()?, learner.build()?);
    let (mut b0, mut b1) = (opponent.build()?, opponent.build()?);
    Ok(run_match(
        [a0.as_mut(), a1.as_mut()],
        [b0.as_mut(), b1.as_mut()],
        base_seed,
        game_index,
    ))
}

/// `games` matches on derived seeds, in parallel, returned in game order.
pub fn tournament(
    learner: &Entrant,
    opponent: &Entrant,
    games: u64,
    base_seed: u64,
    pool: &ThreadPool,
) -> Result<(WltRow, Vec<MatchResult>)> {
    if games == 0 {
        return Err(LabError::BadArgs(
            "a tournament needs at least one game".into(),
        ));
    }
    let results: Vec<MatchResult> = pool.install(|| {
        (0..games)
            .into_par_iter()
            .map(|i| play(learner, opponent, base_seed, i))
            .collect::<Result<_>>()
    })?;
    let outcomes: Vec<MatchOutcome> = results.iter().map(|r| r.outcome).collect();
    Ok((WltRow::from_outcomes(opponent.name(), &outcomes), results))
}
