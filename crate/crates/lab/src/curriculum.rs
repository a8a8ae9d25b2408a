//! Curriculum PPO driver: waves of training games, updates, the JSONL
//! training log, per-phase checkpoints and resumable snapshots.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use pommer_core::nn::{decode_checkpoint, encode_checkpoint, Adam, Checkpoint, Mode, Network};
use pommer_core::rng;
use pommer_core::train::{
    play_training_game, GameLog, PpoLearner, RolloutOptions, TrainError, UpdateStats,
};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::artifacts::{checkpoint_hash, ensure_dir, save_checkpoint, write_atomic};
use crate::config::RunConfig;
use crate::error::{LabError, Result};

pub const LOG_FILE: &str = "train_log.jsonl";
pub const SNAPSHOT_FILE: &str = "resume.bin";
const SNAPSHOT_MAGIC: &[u8; 4] = b"PMRS";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Game(GameLog),
    Update {
        phase: usize,
        games_done: u64,
        #[serde(flatten)]
        stats: UpdateStats,
    },
    Phase {
        phase: usize,
        opponent: String,
        games: u64,
        policy_hash: String,
        value_hash: String,
    },
}

/// Reads every line of a training log.
pub fn read_log(path: &Path) -> Result<Vec<LogLine>> {
    let f = fs::File::open(path).map_err(LabError::io(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(LabError::io(path))?;
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| LabError::corrupt(path, format!("line {}: {e}", n + 1)))?,
        );
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CurriculumOutcome {
    pub policy: Network<f32>,
    pub value: Network<f32>,
    /// Policy checkpoint hash at the end of each completed phase.
    pub phase_policy_hashes: Vec<String>,
    pub games_done: u64,
    pub finished: bool,
    pub out_dir: PathBuf,
}

pub struct CurriculumRun<'a> {
    pub cfg: &'a RunConfig,
    /// Lineage written into checkpoint provenance, e.g. "PPOAgent".
    pub lineage: &'a str,
    pub out_dir: &'a Path,
    pub pool: &'a ThreadPool,
    /// Stop (after snapshotting) once this many games are done.
    pub stop_after: Option<u64>,
}

struct Snapshot {
    config_hash: String,
    next_game: u64,
    log_len: u64,
    learner: PpoLearner,
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_adam(out: &mut Vec<u8>, a: &Adam) {
    put_u64(out, a.t);
    put_u64(out, a.m.len() as u64);
    for x in a.m.iter().chain(&a.v) {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

fn encode_snapshot(s: &Snapshot) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&hex::decode(&s.config_hash).expect("config hash is hex"));
    put_u64(&mut out, s.next_game);
    put_u64(&mut out, s.learner.updates);
    put_u64(&mut out, s.log_len);
    for net in [&s.learner.policy, &s.learner.value] {
        let bytes = encode_checkpoint(&Checkpoint {
            provenance: String::new(),
            network: net.clone(),
        });
        put_u64(&mut out, bytes.len() as u64);
        out.extend_from_slice(&bytes);
    }
    put_adam(&mut out, &s.learner.policy_opt);
    put_adam(&mut out, &s.learner.value_opt);
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.buf.get(self.pos..self.pos.checked_add(n)?)?;
        self.pos += n;
        Some(s)
    }
    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
    fn f64s(&mut self, n: usize) -> Option<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8)?)?;
        Some(
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        )
    }
}

fn decode_snapshot(bytes: &[u8], cfg: &RunConfig, path: &Path) -> Result<Snapshot> {
    let bad = |d: &str| LabError::corrupt(path, format!("snapshot: {d}"));
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4) != Some(SNAPSHOT_MAGIC) {
        return Err(bad("bad magic"));
    }
    if c.take(4).map(|v| u32::from_le_bytes(v.try_into().unwrap())) != Some(SNAPSHOT_VERSION) {
        return Err(bad("unsupported version"));
    }
    let config_hash = hex::encode(c.take(32).ok_or_else(|| bad("truncated"))?);
    let next_game = c.u64().ok_or_else(|| bad("truncated"))?;
    let updates = c.u64().ok_or_else(|| bad("truncated"))?;
    let log_len = c.u64().ok_or_else(|| bad("truncated"))?;
    let mut nets = Vec::new();
    for _ in 0..2 {
        let len = c.u64().ok_or_else(|| bad("truncated"))? as usize;
        let raw = c.take(len).ok_or_else(|| bad("truncated network"))?;
        nets.push(
            decode_checkpoint(raw)
                .map_err(|e| bad(&e.to_string()))?
                .network,
        );
    }
    let mut adam = |cfg_lr| -> Result<Adam> {
        let t = c.u64().ok_or_else(|| bad("truncated"))?;
        let n = c.u64().ok_or_else(|| bad("truncated"))? as usize;
        let m = c.f64s(n).ok_or_else(|| bad("truncated optimizer"))?;
        let v = c.f64s(n).ok_or_else(|| bad("truncated optimizer"))?;
        Ok(Adam {
            config: cfg_lr,
            m,
            v,
            t,
        })
    };
    let ppo = &cfg.curriculum.ppo;
    let policy_opt = adam(ppo.policy_adam())?;
    let value_opt = adam(ppo.value_adam())?;
    if c.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    let value = nets.pop().unwrap();
    let policy = nets.pop().unwrap();
    if policy_opt.m.len() != policy.param_count() || value_opt.m.len() != value.param_count() {
        return Err(bad("optimizer size does not match the network"));
    }
    Ok(Snapshot {
        config_hash,
        next_game,
        log_len,
        learner: PpoLearner {
            policy,
            value,
            policy_opt,
            value_opt,
            updates,
        },
    })
}

impl CurriculumRun<'_> {
    /// Starts a fresh run from the imitation policy.
    pub fn start(&self, init: &Network<f32>) -> Result<CurriculumOutcome> {
        ensure_dir(self.out_dir)?;
        let spec = init.spec().clone();
        let value = Network::new(
            spec.value_twin(),
            rng::derive_seed(self.cfg.seed, 0x7661_6c75_65),
        );
        let mut policy = init.clone();
        policy.mode = Mode::Eval;
        let learner = PpoLearner::new(policy, value, &self.cfg.curriculum.ppo);
        let log = self.out_dir.join(LOG_FILE);
        fs::write(&log, b"").map_err(LabError::io(&log))?;
        self.run(learner, 0)
    }

    /// Continues from the snapshot in the output directory. The config must
    /// hash to the one the snapshot was taken under.
    pub fn resume(&self) -> Result<CurriculumOutcome> {
        let path = self.out_dir.join(SNAPSHOT_FILE);
        let bytes = fs::read(&path).map_err(LabError::io(&path))?;
        let snap = decode_snapshot(&bytes, self.cfg, &path)?;
        let expected = self.cfg.hash();
        if snap.config_hash != expected {
            return Err(LabError::ConfigMismatch {
                expected,
                found: snap.config_hash,
            });
        }
        let log = self.out_dir.join(LOG_FILE);
        let f = OpenOptions::new()
            .write(true)
            .open(&log)
            .map_err(LabError::io(&log))?;
        f.set_len(snap.log_len).map_err(LabError::io(&log))?;
        self.run(snap.learner, snap.next_game)
    }

    fn run(&self, mut learner: PpoLearner, mut next_game: u64) -> Result<CurriculumOutcome> {
        let cfg = self.cfg;
        let cur = &cfg.curriculum;
        let hash = cfg.hash();
        let provenance = format!("{} {hash}", self.lineage);
        let total = cur.total_games();
        let log_path = self.out_dir.join(LOG_FILE);
        let mut log = OpenOptions::new()
            .append(true)
            .open(&log_path)
            .map_err(LabError::io(&log_path))?;
        let mut write = |line: &LogLine| -> Result<()> {
            let mut s = serde_json::to_string(line).expect("log lines serialize");
            s.push('\n');
            log.write_all(s.as_bytes()).map_err(LabError::io(&log_path))
        };
        let mut phase_policy_hashes = Vec::new();
        let mut since_snapshot = 0;
        while next_game < total {
            if self.stop_after.is_some_and(|s| next_game >= s) {
                break;
            }
            let phase = cur.phase_of(next_game).expect("below total");
            let spec = &cur.phases[phase];
            let phase_end = cur.phase_start(phase) + cur.phase_games(phase);
            let wave_end = (next_game + cur.ppo.games_per_update as u64).min(phase_end);
            let opts = RolloutOptions {
                policy: &learner.policy,
                value: &learner.value,
                opponent: &spec.opponent,
                teammate_suicide: cur.teammate_suicide,
                shaped_reward: cur.shaped_reward,
                p_jitter: cur.p_jitter,
                p_action: cur.p_action,
                base_seed: cfg.seed,
            };
            let wave: Vec<_> = self.pool.install(|| {
                (next_game..wave_end)
                    .into_par_iter()
                    .map(|g| play_training_game(&opts, g, phase))
                    .collect::<std::result::Result<_, TrainError>>()
            })?;
            let (trajs, logs): (Vec<_>, Vec<_>) = wave.into_iter().unzip();
            for l in logs {
                write(&LogLine::Game(l))?;
            }
            let stats = learner.update(&trajs, &cur.ppo, spec.policy_frozen, cfg.seed)?;
            since_snapshot += wave_end - next_game;
            next_game = wave_end;
            write(&LogLine::Update {
                phase,
                games_done: next_game,
                stats,
            })?;
            if next_game == phase_end {
                let p = self.out_dir.join(format!("phase{phase}_policy.ckpt"));
                let v = self.out_dir.join(format!("phase{phase}_value.ckpt"));
                let policy_hash = save_checkpoint(&p, &learner.policy, &provenance)?;
                let value_hash = save_checkpoint(&v, &learner.value, &provenance)?;
                phase_policy_hashes.push(policy_hash.clone());
                write(&LogLine::Phase {
                    phase,
                    opponent: spec.opponent.clone(),
                    games: cur.phase_games(phase),
                    policy_hash,
                    value_hash,
                })?;
            }
            if next_game == phase_end || since_snapshot >= cfg.snapshot_every || next_game == total
            {
                self.snapshot(&learner, next_game, &hash)?;
                since_snapshot = 0;
            }
        }
        let finished = next_game >= total;
        if finished {
            save_checkpoint(
                &self.out_dir.join("policy.ckpt"),
                &learner.policy,
                &provenance,
            )?;
            save_checkpoint(
                &self.out_dir.join("value.ckpt"),
                &learner.value,
                &provenance,
            )?;
        } else {
            self.snapshot(&learner, next_game, &hash)?;
        }
        Ok(CurriculumOutcome {
            policy: learner.policy,
            value: learner.value,
            phase_policy_hashes,
            games_done: next_game,
            finished,
            out_dir: self.out_dir.to_path_buf(),
        })
    }

    fn snapshot(&self, learner: &PpoLearner, next_game: u64, hash: &str) -> Result<()> {
        let log = self.out_dir.join(LOG_FILE);
        let log_len = fs::metadata(&log).map_err(LabError::io(&log))?.len();
        let bytes = encode_snapshot(&Snapshot {
            config_hash: hash.to_string(),
            next_game,
            log_len,
            learner: learner.clone(),
        });
        write_atomic(&self.out_dir.join(SNAPSHOT_FILE), &bytes)
    }
}

/// Hash of a policy as it would be checkpointed.
pub fn policy_hash(net: &Network<f32>) -> String {
    checkpoint_hash(&Checkpoint {
        provenance: String::new(),
        network: net.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> RunConfig {
        let mut cfg = RunConfig::load(&[
            "scale=0.0004",
            "net.filters=[2,2,2]",
            "net.hidden=8",
            "ppo.games_per_update=2",
            "snapshot_every=2",
            "seed=5",
        ])
        .unwrap();
        // keep games short
        for p in &mut cfg.curriculum.phases {
            p.opponent = "SimpleAgent".into();
        }
        cfg
    }

    fn init(cfg: &RunConfig) -> Network<f32> {
        let mut n = Network::new(cfg.net.spec().unwrap(), 1);
        n.mode = Mode::Eval;
        n
    }

    fn pool(n: usize) -> ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    }

    #[test]
    fn tiny_curriculum_freezes_phase_zero_and_resumes_exactly() {
        let cfg = tiny_cfg();
        let counts: Vec<u64> = (0..4).map(|i| cfg.curriculum.phase_games(i)).collect();
        assert_eq!(counts, vec![4, 4, 8, 24]);
        let net = init(&cfg);
        let (p1, p2) = (pool(1), pool(2));

        let full = tempfile::tempdir().unwrap();
        let run = CurriculumRun {
            cfg: &cfg,
            lineage: "PPOAgent",
            out_dir: full.path(),
            pool: &p1,
            stop_after: None,
        };
        let a = run.start(&net).unwrap();
        assert!(a.finished);
        assert_eq!(a.games_done, 40);
        assert_eq!(a.phase_policy_hashes[0], policy_hash(&net));
        assert_ne!(a.phase_policy_hashes[1], policy_hash(&net));

        let lines = read_log(&full.path().join(LOG_FILE)).unwrap();
        let games: Vec<&GameLog> = lines
            .iter()
            .filter_map(|l| match l {
                LogLine::Game(g) => Some(g),
                _ => None,
            })
            .collect();
        assert_eq!(games.len(), 40);
        assert!(games
            .iter()
            .enumerate()
            .all(|(i, g)| g.game_index == i as u64));
        let phase_games: Vec<usize> = (0..4)
            .map(|p| games.iter().filter(|g| g.phase == p).count())
            .collect();
        assert_eq!(phase_games, vec![4, 4, 8, 24]);

        // interrupted after 10 games, resumed with another worker count
        let part = tempfile::tempdir().unwrap();
        let first = CurriculumRun {
            out_dir: part.path(),
            stop_after: Some(10),
            ..run
        };
        let b = first.start(&net).unwrap();
        assert!(!b.finished);
        assert_eq!(b.games_done, 10);
        let second = CurriculumRun {
            out_dir: part.path(),
            pool: &p2,
            stop_after: None,
            ..first
        };
        let c = second.resume().unwrap();
        assert!(c.finished);
        assert_eq!(c.policy, a.policy);
        assert_eq!(c.value, a.value);
        assert_eq!(
            fs::read(full.path().join(LOG_FILE)).unwrap(),
            fs::read(part.path().join(LOG_FILE)).unwrap()
        );
    }

    #[test]
    fn resume_rejects_another_config() {
        let cfg = tiny_cfg();
        let net = init(&cfg);
        let p = pool(1);
        let dir = tempfile::tempdir().unwrap();
        let run = CurriculumRun {
            cfg: &cfg,
            lineage: "PPOAgent",
            out_dir: dir.path(),
            pool: &p,
            stop_after: Some(2),
        };
        run.start(&net).unwrap();
        let other = RunConfig {
            seed: 6,
            ..cfg.clone()
        };
        let err = CurriculumRun { cfg: &other, ..run }.resume().unwrap_err();
        assert_eq!(err.exit_code(), 4);
        let missing = tempfile::tempdir().unwrap();
        let err = CurriculumRun {
            out_dir: missing.path(),
            ..run
        }
        .resume()
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
