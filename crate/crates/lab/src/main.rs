use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use pommer_core::eval::{heatmaps, MatchOutcome};
use pommer_lab::artifacts::{ensure_dir, load_checkpoint, save_checkpoint, write_atomic};
use pommer_lab::config::RunConfig;
use pommer_lab::curriculum::CurriculumRun;
use pommer_lab::dataset::collect_dataset;
use pommer_lab::imitate::train_imitation;
use pommer_lab::replay::{list_replays, replay_file_name, verify_replay, write_replay};
use pommer_lab::tournament::{tournament, Entrant};
use pommer_lab::{pool, LabError};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "pommer",
    version,
    about = "Pommerman team-mode imitation, curriculum PPO and tournaments"
)]
struct Cli {
    /// Worker threads for rollouts and tournaments (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "POMMER_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Record SimpleAgent self-play as an imitation dataset.
    Collect {
        #[arg(long)]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Config files or key=value overrides, applied in order.
        #[arg(long)]
        config: Vec<String>,
    },
    /// Behavioral cloning on a dataset.
    Imitate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Vec<String>,
    },
    /// Curriculum PPO from an imitation checkpoint.
    Train {
        #[arg(long)]
        config: Vec<String>,
        #[arg(long)]
        init: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Plain PPO: one SimpleAgent phase, live teammate, win/loss reward, no filters.
        #[arg(long)]
        cautious: bool,
        /// Continue from the snapshot in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Tournament of a learner team against an opponent team.
    Eval {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        opponent: String,
        #[arg(long)]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weights for a network learner.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Weights for a network opponent.
        #[arg(long)]
        opponent_checkpoint: Option<PathBuf>,
        /// Write one replay per game into this directory.
        #[arg(long)]
        replays: Option<PathBuf>,
        /// Also write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Vec<String>,
    },
    /// Position and bomb heatmaps of the learner over a directory of replays.
    Heatmap {
        #[arg(long)]
        replays: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-simulate a replay and compare every step.
    VerifyReplay { file: PathBuf },
}

fn out_path(explicit: Option<PathBuf>, out_dir: &Path, default: &str) -> anyhow::Result<PathBuf> {
    let p = explicit.unwrap_or_else(|| out_dir.join(default));
    if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    Ok(p)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn network(path: Option<&PathBuf>) -> anyhow::Result<Option<Arc<pommer_core::nn::Network<f32>>>> {
    path.map(|p| Ok(Arc::new(load_checkpoint(p)?.network)))
        .transpose()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let workers = cli.workers;
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Collect {
            games,
            seed,
            out,
            config,
        } => {
            let cfg = RunConfig::load(&config)?;
            let out = out_path(out, &out_dir, "dataset.bin")?;
            let mut hash = [0u8; 32];
            hex::decode_to_slice(cfg.hash(), &mut hash).expect("sha256 hex");
            let h = collect_dataset(&out, games, seed, hash, &pool(workers)?)?;
            println!(
                "{}",
                json!({
                    "dataset": out,
                    "games": games,
                    "records": h.count,
                    "action_counts": h.action_counts,
                    "majority_frequency": h.majority_frequency(),
                    "config_hash": cfg.hash(),
                })
            );
        }
        Command::Imitate { data, out, config } => {
            let cfg = RunConfig::load(&config)?;
            let out = out_path(out, &out_dir, "imitation.ckpt")?;
            let outcome = train_imitation(&data, &cfg, |e| {
                println!("{}", json!({"type": "eval", "eval": e}));
            })?;
            let hash =
                save_checkpoint(&out, &outcome.network, &format!("Imitation {}", cfg.hash()))?;
            println!(
                "{}",
                json!({
                    "type": "summary",
                    "checkpoint": out,
                    "checkpoint_hash": hash,
                    "best_step": outcome.best_step,
                    "initial": outcome.initial,
                    "best": outcome.best(),
                    "majority_frequency": outcome.majority_frequency,
                    "train_games": outcome.train_games,
                    "holdout_games": outcome.holdout_games,
                    "config_hash": cfg.hash(),
                })
            );
        }
        Command::Train {
            config,
            init,
            out,
            cautious,
            resume,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if cautious {
                cfg = cfg.into_cautious();
            }
            let lineage = if cautious {
                "PPOAgent_Cautious"
            } else {
                "PPOAgent"
            };
            let dir = out
                .unwrap_or_else(|| out_dir.join(if cautious { "train_cautious" } else { "train" }));
            let pool = pool(workers)?;
            let run = CurriculumRun {
                cfg: &cfg,
                lineage,
                out_dir: &dir,
                pool: &pool,
                stop_after: None,
            };
            let outcome = if resume {
                run.resume()?
            } else {
                let ckpt = load_checkpoint(&init).with_context(|| "loading the initial policy")?;
                if ckpt.network.spec().value_twin() != cfg.net.spec()?.value_twin() {
                    eprintln!(
                        "note: checkpoint architecture differs from net.*; using the checkpoint's"
                    );
                }
                run.start(&ckpt.network)?
            };
            let counts: Vec<u64> = (0..cfg.curriculum.phases.len())
                .map(|i| cfg.curriculum.phase_games(i))
                .collect();
            println!(
                "{}",
                json!({
                    "lineage": lineage,
                    "out": dir,
                    "phase_games": counts,
                    "games_done": outcome.games_done,
                    "config_hash": cfg.hash(),
                })
            );
        }
        Command::Eval {
            learner,
            opponent,
            games,
            seed,
            checkpoint,
            opponent_checkpoint,
            replays,
            out,
            config,
        } => {
            let cfg = RunConfig::load(&config)?;
            let a = Entrant::new(&learner, network(checkpoint.as_ref())?)?;
            let b = Entrant::new(&opponent, network(opponent_checkpoint.as_ref())?)?;
            let (row, results) = tournament(&a, &b, games, seed, &pool(workers)?)?;
            if let Some(dir) = replays {
                ensure_dir(&dir)?;
                for m in &results {
                    write_replay(&dir.join(replay_file_name(m.game_index)), m, &cfg.hash())?;
                }
            }
            let mean_len =
                results.iter().map(|m| m.length as f64).sum::<f64>() / results.len() as f64;
            let table = json!({
                "config_hash": cfg.hash(),
                "learner": a.name(),
                "games": row.games,
                "seed": seed,
                "rows": [{
                    "opponent": row.opponent,
                    "win": round3(row.win()),
                    "loss": round3(row.loss()),
                    "tie": round3(row.tie()),
                    "wins": row.wins,
                    "losses": row.losses,
                    "ties": row.ties,
                }],
                "mean_length": mean_len,
                "ties_at_limit": results.iter().filter(|m| m.outcome == MatchOutcome::Tie && m.length == 800).count(),
            });
            let text = serde_json::to_string_pretty(&table)?;
            if let Some(out) = out {
                write_atomic(&out, text.as_bytes())?;
            }
            println!("{text}");
        }
        Command::Heatmap { replays, out } => {
            let files = list_replays(&replays)?;
            if files.is_empty() {
                return Err(
                    LabError::BadArgs(format!("no replays in {}", replays.display())).into(),
                );
            }
            let mut games = Vec::new();
            let mut hashes = std::collections::BTreeSet::new();
            for f in &files {
                let r = verify_replay(f)?;
                hashes.insert(r.config_hash.clone());
                games.push((r.record, r.learner_slots[0]));
            }
            let h = heatmaps(&games)?;
            let out = out_path(out, &out_dir, "heatmap.json")?;
            let doc = json!({
                "config_hashes": hashes,
                "games": h.games,
                "positions": h.positions,
                "bombs": h.bombs,
                "position_total": h.position_total(),
                "bomb_total": h.bomb_total(),
                "away_fraction": h.away_fraction(),
            });
            write_atomic(&out, serde_json::to_string_pretty(&doc)?.as_bytes())?;
            println!(
                "{}",
                json!({"heatmap": out, "games": h.games, "away_fraction": h.away_fraction()})
            );
        }
        Command::VerifyReplay { file } => {
            let r = verify_replay(&file)?;
            println!(
                "{}",
                json!({
                    "verified": file,
                    "steps": r.record.actions.len(),
                    "outcome": r.record.outcome,
                    "config_hash": r.config_hash,
                })
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<LabError>().map_or(1, LabError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
