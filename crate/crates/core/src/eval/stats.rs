use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{replay, GameRecord, MatchOutcome, ReplayError};
use crate::engine::{spawn_corner, AgentId, Position, BOARD_SIZE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("tables cover different opponents: {0:?} vs {1:?}")]
    OpponentMismatch(Vec<String>, Vec<String>),
    #[error("no data")]
    Empty,
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// Win/loss/tie rates of a learner against one opponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WltRow {
    pub opponent: String,
    pub games: usize,
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

impl WltRow {
    pub fn from_outcomes(opponent: impl Into<String>, outcomes: &[MatchOutcome]) -> Self {
        let count = |o| outcomes.iter().filter(|&&x| x == o).count();
        Self {
            opponent: opponent.into(),
            games: outcomes.len(),
            wins: count(MatchOutcome::Win),
            losses: count(MatchOutcome::Loss),
            ties: count(MatchOutcome::Tie),
        }
    }

    fn rate(&self, k: usize) -> f64 {
        if self.games == 0 {
            0.0
        } else {
            k as f64 / self.games as f64
        }
    }

    pub fn win(&self) -> f64 {
        self.rate(self.wins)
    }

    pub fn loss(&self) -> f64 {
        self.rate(self.losses)
    }

    pub fn tie(&self) -> f64 {
        self.rate(self.ties)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WltTable {
    pub learner: String,
    pub rows: Vec<WltRow>,
}

impl WltTable {
    pub fn row(&self, opponent: &str) -> Option<&WltRow> {
        self.rows.iter().find(|r| r.opponent == opponent)
    }

    fn opponents(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.opponent.clone()).collect()
    }
}

/// Rate changes of a variant relative to a baseline against one opponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub opponent: String,
    pub win: f64,
    pub loss: f64,
    pub tie: f64,
}

/// `variant - baseline`, per opponent.
pub fn filter_sensitivity(
    baseline: &WltTable,
    variant: &WltTable,
) -> Result<Vec<Delta>, EvalError> {
    let mut a = baseline.opponents();
    let mut b = variant.opponents();
    a.sort();
    b.sort();
    if a != b {
        return Err(EvalError::OpponentMismatch(a, b));
    }
    Ok(baseline
        .rows
        .iter()
        .map(|base| {
            let v = variant.row(&base.opponent).expect("same opponent set");
            Delta {
                opponent: base.opponent.clone(),
                win: v.win() - base.win(),
                loss: v.loss() - base.loss(),
                tie: v.tie() - base.tie(),
            }
        })
        .collect())
}

/// Pooled two-proportion z statistic for `x1/n1 - x2/n2`. Positive when the
/// first proportion is larger; 0 when both are degenerate and equal.
pub fn two_proportion_z(x1: usize, n1: usize, x2: usize, n2: usize) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let p1 = x1 as f64 / n1f;
    let p2 = x2 as f64 / n2f;
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let se = num_traits::Float::sqrt(pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f));
    if se == 0.0 {
        return 0.0;
    }
    (p1 - p2) / se
}

/// Learner position and bomb placement counts, oriented so the learner
/// always starts in the top-left corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heatmaps {
    pub positions: [[u64; BOARD_SIZE]; BOARD_SIZE],
    pub bombs: [[u64; BOARD_SIZE]; BOARD_SIZE],
    pub games: usize,
}

impl Heatmaps {
    pub fn position_total(&self) -> u64 {
        self.positions.iter().flatten().sum()
    }

    pub fn bomb_total(&self) -> u64 {
        self.bombs.iter().flatten().sum()
    }

    /// Share of position mass outside the 6x6 home quadrant.
    pub fn away_fraction(&self) -> f64 {
        let half = BOARD_SIZE.div_ceil(2);
        let total = self.position_total();
        if total == 0 {
            return 0.0;
        }
        let home: u64 = self.positions[..half]
            .iter()
            .map(|row| row[..half].iter().sum::<u64>())
            .sum();
        (total - home) as f64 / total as f64
    }
}

/// Mirrors `p` so that `slot`'s spawn corner maps to (0, 0).
pub fn normalize(p: Position, slot: AgentId) -> Position {
    let corner = spawn_corner(slot);
    let last = BOARD_SIZE - 1;
    let r = if corner.row == 0 { p.r() } else { last - p.r() };
    let c = if corner.col == 0 { p.c() } else { last - p.c() };
    Position::new(r, c)
}

/// Counts, over every step where the learner is alive, its cell, and every
/// bomb it placed.
pub fn heatmaps(games: &[(GameRecord, AgentId)]) -> Result<Heatmaps, EvalError> {
    if games.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut h = Heatmaps {
        positions: [[0; BOARD_SIZE]; BOARD_SIZE],
        bombs: [[0; BOARD_SIZE]; BOARD_SIZE],
        games: games.len(),
    };
    for (record, slot) in games {
        let slot = *slot;
        replay(record, |state, _actions, events| {
            let me = &state.agents[slot];
            if me.alive {
                let p = normalize(me.position, slot);
                h.positions[p.r()][p.c()] += 1;
            }
            for &(owner, pos) in &events.bombs_placed {
                if owner == slot {
                    let p = normalize(pos, slot);
                    h.bombs[p.r()][p.c()] += 1;
                }
            }
        })?;
    }
    Ok(h)
}

/// Sliding mean over `window` games; the first `window - 1` entries average
/// the shorter prefix.
pub fn rolling_reward(rewards: &[f64], window: usize) -> Result<Vec<f64>, EvalError> {
    if rewards.is_empty() {
        return Err(EvalError::Empty);
    }
    if window == 0 {
        return Err(EvalError::ZeroWindow);
    }
    let mut out = Vec::with_capacity(rewards.len());
    for i in 0..rewards.len() {
        let lo = (i + 1).saturating_sub(window);
        let slice = &rewards[lo..=i];
        out.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    Ok(out)
}
