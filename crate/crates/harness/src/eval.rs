//! Evaluation of saved policy checkpoints.

use crate::experiment::{returns_text, RunError};
use crate::fsutil::write_atomic;
use retcap_core::algo::{evaluate_policy, EvalReport};
use retcap_core::env::EnvKind;
use retcap_core::nn::read_checkpoint;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRequest {
    pub checkpoint: PathBuf,
    pub env: EnvKind,
    pub alpha: f64,
    pub episodes: usize,
    pub seed: u64,
    /// Where to write the return list; defaults to `eval_returns.txt` beside
    /// the checkpoint.
    pub returns_out: Option<PathBuf>,
}

impl EvalRequest {
    pub fn returns_path(&self) -> PathBuf {
        self.returns_out.clone().unwrap_or_else(|| {
            self.checkpoint
                .parent()
                .unwrap_or(Path::new("."))
                .join("eval_returns.txt")
        })
    }
}

/// Rolls out the checkpointed policy, writes every episode return and
/// reports the statistics.
pub fn evaluate_checkpoint(req: &EvalRequest) -> Result<EvalReport, RunError> {
    let file = std::fs::File::open(&req.checkpoint).map_err(|source| RunError::Io {
        path: req.checkpoint.clone(),
        source,
    })?;
    let policy = read_checkpoint(BufReader::new(file))?;
    let report = evaluate_policy(&policy, req.env, req.episodes, req.alpha, req.seed, 0)?;
    let out = req.returns_path();
    write_atomic(&out, returns_text(&report.returns).as_bytes()).map_err(|source| RunError::Io { path: out, source })?;
    Ok(report)
}

/// Parses a return list written by [`evaluate_checkpoint`].
pub fn read_returns(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .enumerate()
        .map(|(i, l)| l.trim().parse().map_err(|_| format!("line {}: not a number: {l:?}", i + 1)))
        .collect()
}
