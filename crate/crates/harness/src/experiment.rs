//! Training runs: one directory per seed holding metrics, checkpoints and a
//! manifest.
//!
//! ```text
//! <root>/<output>/seed-<n>/metrics.csv
//!                         /policy.bin          latest policy checkpoint
//!                         /trainer.json        full state for resuming
//!                         /manifest.json
//!                         /final_eval_returns.txt
//! ```

use crate::config::ExperimentConfig;
use crate::fsutil::write_atomic;
use crate::metrics::{parse_csv, to_csv, CsvError, MetricsRow};
use retcap_core::algo::{EvalReport, RunSpec, Trainer, TrainerState};
use retcap_core::nn::write_checkpoint;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Environment variable naming the directory relative outputs go under.
pub const OUTPUT_ROOT_VAR: &str = "RETCAP_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] retcap_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: CsvError,
    },
    #[error("cannot resume {path}: {message}")]
    Resume { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Output root from the environment, defaulting to `./runs`.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

pub fn run_dir(config: &ExperimentConfig, root: &Path) -> PathBuf {
    if config.output.is_absolute() {
        config.output.clone()
    } else {
        root.join(&config.output)
    }
}

pub fn seed_dir(run_dir: &Path, seed: u64) -> PathBuf {
    run_dir.join(format!("seed-{seed}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: String,
    pub seed: u64,
    pub code_version: String,
    pub min_cap: Option<f64>,
    pub report_alpha: f64,
    pub updates_done: usize,
    pub finished: bool,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Continue from `trainer.json` when present.
    pub resume: bool,
    /// Progress lines on stderr.
    pub verbose: bool,
    /// Stop after this many updates in this invocation (for interruption tests).
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub dir: PathBuf,
    pub rows: Vec<MetricsRow>,
    pub updates_done: usize,
    /// Last evaluation, if any has run.
    pub final_eval: Option<EvalReport>,
}

impl SeedOutcome {
    pub fn final_eval_cvar(&self) -> Option<f64> {
        self.final_eval.as_ref().map(|e| e.cvar)
    }
}

pub fn run_spec(config: &ExperimentConfig, seed: u64) -> Result<RunSpec, RunError> {
    let spec = RunSpec {
        env: config.env,
        algorithm: config.algorithm,
        config: config.algo.clone(),
        seed,
        min_cap: config.resolved_min_cap(),
        report_alpha: config.report_alpha(),
    };
    spec.validate().map_err(|e| RunError::Config(e.to_string()))?;
    Ok(spec)
}

pub fn run_experiment(config: &ExperimentConfig, root: &Path, options: RunOptions) -> Result<Vec<SeedOutcome>, RunError> {
    let dir = run_dir(config, root);
    config
        .seeds
        .iter()
        .map(|&seed| run_seed(config, seed, &seed_dir(&dir, seed), options))
        .collect()
}

struct SeedFiles {
    metrics: PathBuf,
    policy: PathBuf,
    state: PathBuf,
    manifest: PathBuf,
    returns: PathBuf,
}

impl SeedFiles {
    fn new(dir: &Path) -> Self {
        Self {
            metrics: dir.join("metrics.csv"),
            policy: dir.join("policy.bin"),
            state: dir.join("trainer.json"),
            manifest: dir.join("manifest.json"),
            returns: dir.join("final_eval_returns.txt"),
        }
    }
}

fn resume_from(files: &SeedFiles, spec: &RunSpec) -> Result<Option<(Trainer, Vec<MetricsRow>, f64)>, RunError> {
    if !files.state.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&files.state).map_err(io_err(&files.state))?;
    let state: TrainerState = serde_json::from_str(&text).map_err(|source| RunError::Json {
        path: files.state.clone(),
        source,
    })?;
    if &state.run != spec {
        return Err(RunError::Resume {
            path: files.state.clone(),
            message: "saved run was made with a different configuration".into(),
        });
    }
    let trainer = Trainer::from_state(state)?;
    let csv = std::fs::read_to_string(&files.metrics).map_err(io_err(&files.metrics))?;
    let mut rows = parse_csv(&csv).map_err(|source| RunError::Csv {
        path: files.metrics.clone(),
        source,
    })?;
    rows.retain(|r| r.update_index <= trainer.updates_done());
    if rows.len() != trainer.updates_done() {
        return Err(RunError::Resume {
            path: files.metrics.clone(),
            message: format!("{} rows for {} completed updates", rows.len(), trainer.updates_done()),
        });
    }
    let wall = std::fs::read_to_string(&files.manifest)
        .ok()
        .and_then(|t| serde_json::from_str::<Manifest>(&t).ok())
        .map_or(0.0, |m| m.wall_seconds);
    Ok(Some((trainer, rows, wall)))
}

fn save(
    files: &SeedFiles,
    config: &ExperimentConfig,
    trainer: &Trainer,
    rows: &[MetricsRow],
    wall_seconds: f64,
) -> Result<(), RunError> {
    write_atomic(&files.metrics, to_csv(rows).as_bytes()).map_err(io_err(&files.metrics))?;
    let mut policy = Vec::new();
    write_checkpoint(trainer.policy(), &mut policy)?;
    write_atomic(&files.policy, &policy).map_err(io_err(&files.policy))?;
    json(&files.state, &trainer.state())?;
    let run = trainer.run_spec();
    let manifest = Manifest {
        config: config.to_text(),
        seed: run.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        min_cap: run.min_cap,
        report_alpha: run.report_alpha,
        updates_done: trainer.updates_done(),
        finished: trainer.finished(),
        wall_seconds,
    };
    json(&files.manifest, &manifest)
}

fn json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| RunError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    write_atomic(path, text.as_bytes()).map_err(io_err(path))
}

pub fn run_seed(config: &ExperimentConfig, seed: u64, dir: &Path, options: RunOptions) -> Result<SeedOutcome, RunError> {
    let spec = run_spec(config, seed)?;
    let files = SeedFiles::new(dir);
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let resumed = if options.resume { resume_from(&files, &spec)? } else { None };
    let (mut trainer, mut rows, wall_before) = match resumed {
        Some(r) => r,
        None => (Trainer::new(spec)?, Vec::new(), 0.0),
    };
    let start = Instant::now();
    let wall = |start: &Instant| wall_before + start.elapsed().as_secs_f64();
    let mut last_eval: Option<EvalReport> = None;
    let mut steps_this_call = 0;
    while !trainer.finished() {
        if options.stop_after.is_some_and(|n| steps_this_call >= n) {
            break;
        }
        let m = trainer.step()?;
        steps_this_call += 1;
        let u = m.update_index;
        let eval = if u % config.eval_every == 0 || trainer.finished() {
            Some(trainer.evaluate(config.eval_episodes)?)
        } else {
            None
        };
        rows.push(MetricsRow {
            update_index: u,
            cumulative_env_steps: m.cumulative_env_steps,
            train_return_mean: m.train_return_mean,
            train_cvar_alpha: m.train_cvar,
            train_var_alpha: m.train_var,
            eval_cvar_alpha: eval.as_ref().map(|e| e.cvar),
            eval_return_mean: eval.as_ref().map(|e| e.mean),
            cap_value: m.cap,
            wall_seconds: if config.record_wall_time { wall(&start) } else { 0.0 },
        });
        if options.verbose {
            let e = eval
                .as_ref()
                .map(|e| format!(" eval cvar {:.3} mean {:.3}", e.cvar, e.mean))
                .unwrap_or_default();
            eprintln!(
                "seed {seed} update {u}/{} train cvar {:.3} mean {:.3}{e}",
                config.algo.updates, m.train_cvar, m.train_return_mean
            );
        }
        if eval.is_some() {
            last_eval = eval;
        }
        if u % config.checkpoint_every == 0 && !trainer.finished() {
            save(&files, config, &trainer, &rows, wall(&start))?;
        }
    }
    if trainer.finished() && last_eval.is_none() {
        // Finished before this call: rebuild the final evaluation.
        last_eval = Some(trainer.evaluate(config.eval_episodes)?);
    }
    save(&files, config, &trainer, &rows, wall(&start))?;
    if let (true, Some(e)) = (trainer.finished(), &last_eval) {
        write_atomic(&files.returns, returns_text(&e.returns).as_bytes()).map_err(io_err(&files.returns))?;
    }
    Ok(SeedOutcome {
        seed,
        dir: dir.to_path_buf(),
        updates_done: trainer.updates_done(),
        rows,
        final_eval: last_eval,
    })
}

/// One return per line, shortest round-trip formatting.
pub fn returns_text(returns: &[f64]) -> String {
    returns.iter().map(|r| format!("{r:?}\n")).collect()
}
