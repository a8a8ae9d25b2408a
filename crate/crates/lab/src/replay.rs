//! Line-delimited JSON replays: a header, one line per step with the four
//! actions and the state digest after it, and a trailer with the outcome
//! and a sha256 over the action stream.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use pommer_core::engine::{Action, AgentId, Outcome, NUM_AGENTS};
use pommer_core::eval::{replay, GameRecord, MatchResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::artifacts::write_atomic;
use crate::error::{LabError, Result};

const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header {
        version: u32,
        config_hash: String,
        seed: u64,
        game_index: u64,
        agents: [String; NUM_AGENTS],
        learner_slots: [AgentId; 2],
    },
    Step {
        tick: u32,
        actions: [u8; NUM_AGENTS],
        digest: String,
    },
    Trailer {
        length: u32,
        outcome: Outcome,
        death_ticks: [Option<u32>; NUM_AGENTS],
        actions_sha256: String,
    },
}

/// A parsed replay file.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub config_hash: String,
    pub game_index: u64,
    pub learner_slots: [AgentId; 2],
    pub record: GameRecord,
    pub actions_sha256: String,
}

/// sha256 over the action indices, four bytes per step.
pub fn action_stream_hash(actions: &[[Action; NUM_AGENTS]]) -> String {
    let mut h = Sha256::new();
    for step in actions {
        h.update(step.map(|a| a.index() as u8));
    }
    hex::encode(h.finalize())
}

pub fn replay_file_name(game_index: u64) -> String {
    format!("game_{game_index:06}.jsonl")
}

pub fn write_replay(path: &Path, m: &MatchResult, config_hash: &str) -> Result<()> {
    let r = &m.record;
    let mut lines = Vec::with_capacity(r.actions.len() + 2);
    lines.push(Line::Header {
        version: VERSION,
        config_hash: config_hash.to_string(),
        seed: r.seed,
        game_index: m.game_index,
        agents: r.agents.clone(),
        learner_slots: m.learner_slots,
    });
    for (t, (a, d)) in r.actions.iter().zip(&r.digests).enumerate() {
        lines.push(Line::Step {
            tick: t as u32 + 1,
            actions: a.map(|a| a.index() as u8),
            digest: format!("{d:016x}"),
        });
    }
    lines.push(Line::Trailer {
        length: r.length(),
        outcome: r.outcome,
        death_ticks: r.death_ticks,
        actions_sha256: action_stream_hash(&r.actions),
    });
    let mut out = String::new();
    for l in &lines {
        out.push_str(&serde_json::to_string(l).expect("replay lines serialize"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Parses a replay without re-simulating it.
pub fn read_replay(path: &Path) -> Result<Replay> {
    let f = File::open(path).map_err(LabError::io(path))?;
    let mut lines = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(LabError::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| LabError::corrupt(path, format!("line {}: {e}", n + 1)))?;
        lines.push(parsed);
    }
    let corrupt = |d: &str| LabError::corrupt(path, d.to_string());
    let mut it = lines.into_iter();
    let Some(Line::Header {
        version,
        config_hash,
        seed,
        game_index,
        agents,
        learner_slots,
    }) = it.next()
    else {
        return Err(corrupt("missing header"));
    };
    if version != VERSION {
        return Err(corrupt("unsupported replay version"));
    }
    let mut actions = Vec::new();
    let mut digests = Vec::new();
    let mut trailer = None;
    for l in it {
        match l {
            Line::Step {
                tick,
                actions: a,
                digest,
            } => {
                if trailer.is_some() {
                    return Err(corrupt("step after trailer"));
                }
                if tick as usize != actions.len() + 1 {
                    return Err(LabError::Verify(format!("step {tick} out of order")));
                }
                let mut step = [Action::Stop; NUM_AGENTS];
                for (s, &b) in step.iter_mut().zip(&a) {
                    *s = Action::from_index(b as usize).ok_or_else(|| {
                        LabError::Verify(format!("step {tick}: invalid action {b}"))
                    })?;
                }
                actions.push(step);
                digests.push(
                    u64::from_str_radix(&digest, 16)
                        .map_err(|_| corrupt("digest is not hexadecimal"))?,
                );
            }
            Line::Trailer {
                length,
                outcome,
                death_ticks,
                actions_sha256,
            } => {
                if trailer.is_some() {
                    return Err(corrupt("two trailers"));
                }
                trailer = Some((length, outcome, death_ticks, actions_sha256));
            }
            Line::Header { .. } => return Err(corrupt("second header")),
        }
    }
    let Some((length, outcome, death_ticks, actions_sha256)) = trailer else {
        return Err(corrupt("missing trailer"));
    };
    if length as usize != actions.len() {
        return Err(LabError::Verify(format!(
            "trailer says {length} steps, file has {}",
            actions.len()
        )));
    }
    Ok(Replay {
        config_hash,
        game_index,
        learner_slots,
        record: GameRecord {
            seed,
            agents,
            actions,
            outcome,
            death_ticks,
            digests,
        },
        actions_sha256,
    })
}

/// Checks the action hash, then re-simulates every step against the stored
/// digests, outcome and death ticks.
pub fn verify_replay(path: &Path) -> Result<Replay> {
    let r = read_replay(path)?;
    let hash = action_stream_hash(&r.record.actions);
    if hash != r.actions_sha256 {
        return Err(LabError::Verify("action stream hash mismatch".into()));
    }
    let mut deaths = [None; NUM_AGENTS];
    let mut tick = 0u32;
    replay(&r.record, |_, _, events| {
        tick += 1;
        for &d in &events.deaths {
            deaths[d] = Some(tick);
        }
    })
    .map_err(|e| LabError::Verify(e.to_string()))?;
    if deaths != r.record.death_ticks {
        return Err(LabError::Verify(
            "death ticks differ from re-simulation".into(),
        ));
    }
    Ok(r)
}

/// Replay files in `dir`, sorted by name.
pub fn list_replays(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(LabError::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    out.sort();
    Ok(out)
}
