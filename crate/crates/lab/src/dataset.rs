//! Expert dataset files.
//!
//! ```text
//! magic "PMDS" | version u32 | count u64 | config sha256 [32]
//! | games u32 | action counts u64 x 6 | records per game u32 x games
//! | count x (19*11*11 f32 LE, channel-major | action u8)
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use pommer_core::agents::{AgentPolicy, SimpleAgent};
use pommer_core::encoder::{encode_into, TENSOR_LEN};
use pommer_core::engine::{generate_board, Action, NUM_AGENTS};
use pommer_core::eval::agent_seed;
use pommer_core::rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::artifacts::tmp_path;
use crate::error::{LabError, Result};

pub const DATASET_MAGIC: &[u8; 4] = b"PMDS";
const VERSION: u32 = 1;
pub const RECORD_LEN: usize = TENSOR_LEN * 4 + 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetHeader {
    pub count: u64,
    pub config_hash: [u8; 32],
    pub action_counts: [u64; Action::COUNT],
    pub game_counts: Vec<u32>,
}

impl DatasetHeader {
    pub fn byte_len(&self) -> u64 {
        (4 + 4 + 8 + 32 + 4 + 8 * Action::COUNT + 4 * self.game_counts.len()) as u64
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len() as usize);
        out.extend_from_slice(DATASET_MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.count.to_le_bytes());
        out.extend_from_slice(&self.config_hash);
        out.extend_from_slice(&(self.game_counts.len() as u32).to_le_bytes());
        for c in self.action_counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for c in &self.game_counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    fn read(r: &mut impl Read, path: &Path) -> Result<Self> {
        let bad = |d: &str| LabError::corrupt(path, format!("dataset header: {d}"));
        let mut fixed = [0u8; 4 + 4 + 8 + 32 + 4 + 8 * Action::COUNT];
        r.read_exact(&mut fixed).map_err(|_| bad("truncated"))?;
        if &fixed[..4] != DATASET_MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(fixed[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(fixed[i..i + 8].try_into().unwrap());
        if u32_at(4) != VERSION {
            return Err(bad("unsupported version"));
        }
        let count = u64_at(8);
        let config_hash: [u8; 32] = fixed[16..48].try_into().unwrap();
        let games = u32_at(48) as usize;
        let action_counts = core::array::from_fn(|a| u64_at(52 + 8 * a));
        let mut per_game = vec![0u8; 4 * games];
        r.read_exact(&mut per_game)
            .map_err(|_| bad("truncated game table"))?;
        let game_counts: Vec<u32> = per_game
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let h = Self {
            count,
            config_hash,
            action_counts,
            game_counts,
        };
        if h.game_counts.iter().map(|&c| c as u64).sum::<u64>() != count
            || h.action_counts.iter().sum::<u64>() != count
        {
            return Err(bad("counts disagree"));
        }
        Ok(h)
    }

    /// Frequency of the most common action over the whole dataset.
    pub fn majority_frequency(&self) -> Option<f64> {
        let max = *self.action_counts.iter().max()?;
        (self.count > 0).then(|| max as f64 / self.count as f64)
    }

    /// Global record indices of game `g`.
    pub fn game_range(&self, g: usize) -> Range<u64> {
        let start: u64 = self.game_counts[..g].iter().map(|&c| c as u64).sum();
        start..start + self.game_counts[g] as u64
    }
}

/// Plays one four-SimpleAgent game and hands every alive agent's encoded
/// observation and chosen action to `sink`, tick by tick, slot by slot.
pub fn expert_game(game_seed: u64, mut sink: impl FnMut(&[f32], Action)) {
    let mut state = generate_board(game_seed);
    let mut agents: Vec<SimpleAgent> = (0..NUM_AGENTS).map(|_| SimpleAgent::new(true)).collect();
    for (slot, a) in agents.iter_mut().enumerate() {
        a.reset(agent_seed(game_seed, slot));
    }
    let mut x = vec![0.0f32; TENSOR_LEN];
    while !state.is_terminal() {
        let mut actions = [Action::Stop; NUM_AGENTS];
        for slot in 0..NUM_AGENTS {
            if let Ok(obs) = state.observe(slot) {
                actions[slot] = agents[slot].act(&obs);
                encode_into(&obs, &mut x).expect("engine observations encode");
                sink(&x, actions[slot]);
            }
        }
        state.step_mut(actions).expect("game is running");
    }
}

/// Seed of game `g` of a collection run.
pub fn collection_seed(seed: u64, g: u64) -> u64 {
    rng::derive_seed(seed ^ 0x636f_6c6c_6563_7400, g)
}

fn game_bytes(game_seed: u64) -> (Vec<u8>, u32, [u64; Action::COUNT]) {
    let mut bytes = Vec::new();
    let mut n = 0u32;
    let mut actions = [0u64; Action::COUNT];
    expert_game(game_seed, |x, a| {
        for v in x {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bytes.push(a.index() as u8);
        n += 1;
        actions[a.index()] += 1;
    });
    (bytes, n, actions)
}

/// Plays `games` expert games and writes their records to `out`. The file
/// appears only once complete; on failure nothing is left behind.
pub fn collect_dataset(
    out: &Path,
    games: u64,
    seed: u64,
    config_hash: [u8; 32],
    pool: &ThreadPool,
) -> Result<DatasetHeader> {
    if games == 0 {
        return Err(LabError::BadArgs("collect needs at least one game".into()));
    }
    let tmp = tmp_path(out);
    let res = write_collection(&tmp, games, seed, config_hash, pool).and_then(|h| {
        fs::rename(&tmp, out).map_err(LabError::io(out))?;
        Ok(h)
    });
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

fn write_collection(
    tmp: &Path,
    games: u64,
    seed: u64,
    config_hash: [u8; 32],
    pool: &ThreadPool,
) -> Result<DatasetHeader> {
    let io = LabError::io(tmp);
    let mut header = DatasetHeader {
        count: 0,
        config_hash,
        action_counts: [0; Action::COUNT],
        game_counts: vec![0; games as usize],
    };
    let file = File::create(tmp).map_err(LabError::io(tmp))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    let inner = (|| -> std::io::Result<()> {
        w.write_all(&header.to_bytes())?;
        let chunk = pool.current_num_threads().max(1) as u64 * 2;
        let mut g = 0;
        while g < games {
            let end = (g + chunk).min(games);
            let parts: Vec<_> = pool.install(|| {
                (g..end)
                    .into_par_iter()
                    .map(|i| game_bytes(collection_seed(seed, i)))
                    .collect()
            });
            for (i, (bytes, n, actions)) in (g..end).zip(parts) {
                w.write_all(&bytes)?;
                header.game_counts[i as usize] = n;
                header.count += n as u64;
                for (c, a) in header.action_counts.iter_mut().zip(actions) {
                    *c += a;
                }
            }
            g = end;
        }
        w.seek(SeekFrom::Start(0))?;
        w.write_all(&header.to_bytes())?;
        let f = w.into_inner().map_err(|e| e.into_error())?;
        f.sync_all()
    })();
    inner.map_err(io)?;
    Ok(header)
}

/// Random access into a dataset file.
pub struct Dataset {
    pub header: DatasetHeader,
    path: PathBuf,
    file: File,
    buf: Vec<u8>,
}

impl Dataset {
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = File::open(path).map_err(LabError::io(path))?;
        let header = DatasetHeader::read(&mut file, path)?;
        let len = file.metadata().map_err(LabError::io(path))?.len();
        if len != header.byte_len() + header.count * RECORD_LEN as u64 {
            return Err(LabError::corrupt(
                path,
                "file length does not match the record count",
            ));
        }
        if header.count == 0 {
            return Err(LabError::corrupt(path, "empty dataset"));
        }
        Ok(Self {
            header,
            path: path.to_path_buf(),
            file,
            buf: vec![0; RECORD_LEN],
        })
    }

    /// Reads record `i` into `x` and returns its action.
    pub fn read(&mut self, i: u64, x: &mut [f32]) -> Result<Action> {
        if i >= self.header.count || x.len() != TENSOR_LEN {
            return Err(LabError::BadArgs(format!("record {i} out of range")));
        }
        let off = self.header.byte_len() + i * RECORD_LEN as u64;
        let io = LabError::io(&self.path);
        self.file
            .seek(SeekFrom::Start(off))
            .and_then(|_| self.file.read_exact(&mut self.buf))
            .map_err(io)?;
        for (v, b) in x.iter_mut().zip(self.buf.chunks_exact(4)) {
            *v = f32::from_le_bytes(b.try_into().unwrap());
        }
        Action::from_index(self.buf[RECORD_LEN - 1] as usize)
            .ok_or_else(|| LabError::corrupt(&self.path, format!("record {i}: bad action byte")))
    }
}
