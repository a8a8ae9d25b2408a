//! Run configuration: a TOML file (dotted keys allowed) merged with
//! `key=value` overrides, hashed for provenance.

use std::path::Path;

use pommer_core::nn::NetSpec;
use pommer_core::train::CurriculumConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetConfig {
    /// Filters of the three conv layers.
    pub filters: Vec<usize>,
    pub hidden: usize,
    pub dropout: f32,
}

impl Default for NetConfig {
    fn default() -> Self {
        let spec = NetSpec::policy();
        Self {
            filters: spec.convs.iter().map(|c| c.filters).collect(),
            hidden: spec.hidden,
            dropout: spec.dropout,
        }
    }
}

impl NetConfig {
    pub fn spec(&self) -> Result<NetSpec> {
        let base = NetSpec::policy();
        if self.filters.len() != base.convs.len() || self.filters.contains(&0) || self.hidden == 0 {
            return Err(LabError::BadArgs(format!(
                "net needs {} non-zero conv widths and a non-zero hidden size",
                base.convs.len()
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(LabError::BadArgs("net.dropout must be in [0, 1)".into()));
        }
        Ok(NetSpec {
            dropout: self.dropout,
            ..base.with_widths(&self.filters, self.hidden)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImitationConfig {
    pub lr: f64,
    pub batch: usize,
    /// Minibatch steps in total.
    pub steps: usize,
    /// Holdout evaluation every this many steps.
    pub eval_every: usize,
    /// Training records drawn (without replacement) from the training games.
    pub train_records: usize,
    /// Records drawn from the holdout games for evaluation.
    pub holdout_records: usize,
    pub holdout_fraction: f64,
}

impl Default for ImitationConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            batch: 64,
            steps: 20_000,
            eval_every: 2_000,
            train_records: 200_000,
            holdout_records: 5_000,
            holdout_fraction: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub net: NetConfig,
    pub imitation: ImitationConfig,
    /// Games between resumable snapshots during curriculum training.
    pub snapshot_every: u64,
    #[serde(flatten)]
    pub curriculum: CurriculumConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            net: NetConfig::default(),
            imitation: ImitationConfig::default(),
            snapshot_every: 200,
            curriculum: CurriculumConfig::default(),
        }
    }
}

impl RunConfig {
    /// Merges config sources in order. A source containing `=` that is not an
    /// existing file is a `dotted.key=value` override; anything else is a
    /// TOML file.
    pub fn load<S: AsRef<str>>(sources: &[S]) -> Result<Self> {
        let mut merged = Table::new();
        for src in sources {
            let src = src.as_ref();
            if src.contains('=') && !Path::new(src).is_file() {
                apply_override(&mut merged, src)?;
            } else {
                let path = Path::new(src);
                let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
                let table: Table = text
                    .parse()
                    .map_err(|e: toml::de::Error| LabError::corrupt(path, e.to_string()))?;
                merge(&mut merged, table);
            }
        }
        Self::from_table(merged)
    }

    pub fn from_table(table: Table) -> Result<Self> {
        let cfg: RunConfig = Value::Table(table.clone())
            .try_into()
            .map_err(|e: toml::de::Error| LabError::BadArgs(format!("config: {e}")))?;
        let known = Value::try_from(&cfg).map_err(|e| LabError::BadArgs(format!("config: {e}")))?;
        check_known(&table, &known, "")?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.net.spec()?;
        let c = &self.curriculum;
        if c.phases.is_empty() || !(c.scale > 0.0) {
            return Err(LabError::BadArgs(
                "curriculum needs phases and a positive scale".into(),
            ));
        }
        for p in [c.p_jitter, c.p_action] {
            if !(0.0..=1.0).contains(&p) {
                return Err(LabError::BadArgs(
                    "arming probabilities must be in [0, 1]".into(),
                ));
            }
        }
        if c.ppo.games_per_update == 0 || c.ppo.minibatch == 0 {
            return Err(LabError::BadArgs(
                "ppo.games_per_update and ppo.minibatch must be positive".into(),
            ));
        }
        if c.ppo.entropy_coef != 0.0 {
            return Err(LabError::BadArgs(
                "ppo.entropy_coef other than 0 is not supported".into(),
            ));
        }
        let im = &self.imitation;
        if im.batch == 0
            || im.eval_every == 0
            || !(0.0 < im.holdout_fraction && im.holdout_fraction < 1.0)
        {
            return Err(LabError::BadArgs(
                "imitation.batch, eval_every and holdout_fraction out of range".into(),
            ));
        }
        Ok(())
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    /// Switches to the plain-PPO regime, keeping the PPO hyperparameters.
    pub fn into_cautious(mut self) -> Self {
        let ppo = self.curriculum.ppo.clone();
        let scale = self.curriculum.scale;
        self.curriculum = CurriculumConfig {
            ppo,
            scale,
            ..CurriculumConfig::cautious()
        };
        self
    }
}

fn merge(into: &mut Table, from: Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

fn apply_override(table: &mut Table, raw: &str) -> Result<()> {
    let (key, value) = raw.split_once('=').expect("caller checked");
    let key = key.trim();
    let value = value.trim();
    if key.is_empty() {
        return Err(LabError::BadArgs(format!("override without a key: {raw}")));
    }
    let parsed = format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields one part");
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => return Err(LabError::BadArgs(format!("{key}: {p} is not a table"))),
        };
    }
    cur.insert(last.to_string(), parsed);
    Ok(())
}

fn check_known(given: &Table, known: &Value, prefix: &str) -> Result<()> {
    for (k, v) in given {
        let path = format!("{prefix}{k}");
        let Some(kv) = known.get(k) else {
            return Err(LabError::BadArgs(format!("unknown config key {path}")));
        };
        if let (Value::Table(t), Value::Table(_)) = (v, kv) {
            check_known(t, kv, &format!("{path}."))?;
        }
    }
    Ok(())
}
