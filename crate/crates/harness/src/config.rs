//! Experiment configuration files.
//!
//! ```text
//! [experiment]
//! env = betting
//! algorithm = return_capping
//! seeds = 1, 2, 3
//! output = betting-rc
//!
//! [training]
//! alpha = 0.2
//! min_cap = conservative_cvar
//!
//! [evaluation]
//! episodes = 1000
//! every = 5
//! ```
//!
//! `;` and `#` start comments. Keys that are left out take the environment's
//! table defaults, and [`ExperimentConfig::to_text`] writes every key back out.

use retcap_core::algo::{report_alpha, AlgoConfig, Algorithm, FairnessMode};
use retcap_core::env::EnvKind;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        line,
        message: message.into(),
    }
}

/// How the floor of the return cap is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinCapChoice {
    OptimalVar,
    ExpectedValueCvar,
    ConservativeCvar,
    RandomCvar,
    Explicit(f64),
}

impl MinCapChoice {
    pub fn default_for(env: EnvKind) -> Self {
        match env {
            EnvKind::Av => MinCapChoice::RandomCvar,
            _ => MinCapChoice::ConservativeCvar,
        }
    }

    /// Table value for `env`, or `None` when the table has no such row.
    pub fn resolve(self, env: EnvKind) -> Option<f64> {
        use MinCapChoice::*;
        match (self, env) {
            (Explicit(v), _) => Some(v),
            (OptimalVar, EnvKind::Betting) => Some(16.0),
            (ExpectedValueCvar, EnvKind::Betting) => Some(-16.0),
            (ConservativeCvar, EnvKind::Betting) => Some(0.0),
            (OptimalVar, EnvKind::Av) => Some(27.0),
            (ExpectedValueCvar, EnvKind::Av) => Some(6.0),
            (RandomCvar, EnvKind::Av) => Some(-256.0),
            (OptimalVar, EnvKind::MazeContinuous) => Some(-3.7),
            (ExpectedValueCvar, EnvKind::MazeContinuous) => Some(-54.0),
            (ConservativeCvar, EnvKind::MazeContinuous) => Some(-151.0),
            (OptimalVar, EnvKind::MazeDiscrete) => Some(-4.0),
            (ExpectedValueCvar, EnvKind::MazeDiscrete) => Some(-40.0),
            (ConservativeCvar, EnvKind::MazeDiscrete) => Some(-90.0),
            _ => None,
        }
    }
}

impl fmt::Display for MinCapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinCapChoice::OptimalVar => f.write_str("optimal_var"),
            MinCapChoice::ExpectedValueCvar => f.write_str("expected_value_cvar"),
            MinCapChoice::ConservativeCvar => f.write_str("conservative_cvar"),
            MinCapChoice::RandomCvar => f.write_str("random_cvar"),
            MinCapChoice::Explicit(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for MinCapChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "optimal_var" => Ok(MinCapChoice::OptimalVar),
            "expected_value_cvar" => Ok(MinCapChoice::ExpectedValueCvar),
            "conservative_cvar" => Ok(MinCapChoice::ConservativeCvar),
            "random_cvar" => Ok(MinCapChoice::RandomCvar),
            _ => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(MinCapChoice::Explicit(v)),
                _ => Err(format!(
                    "min_cap must be optimal_var, expected_value_cvar, conservative_cvar, random_cvar or a number, got {s:?}"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    /// Run directory, relative to the output root unless absolute.
    pub output: PathBuf,
    pub algo: AlgoConfig,
    pub min_cap: MinCapChoice,
    pub checkpoint_every: usize,
    /// Write measured seconds into the metrics instead of zeros.
    pub record_wall_time: bool,
    pub eval_episodes: usize,
    pub eval_every: usize,
}

impl ExperimentConfig {
    pub fn new(env: EnvKind, algorithm: Algorithm) -> Self {
        Self {
            env,
            algorithm,
            seeds: vec![1],
            output: PathBuf::from(format!("{env}-{algorithm}")),
            algo: AlgoConfig::defaults(env, algorithm),
            min_cap: MinCapChoice::default_for(env),
            checkpoint_every: 10,
            record_wall_time: false,
            eval_episodes: 1000,
            eval_every: 5,
        }
    }

    pub fn report_alpha(&self) -> f64 {
        report_alpha(self.env)
    }

    /// Cap floor handed to the trainer; `None` for algorithms without a cap.
    pub fn resolved_min_cap(&self) -> Option<f64> {
        match self.algorithm {
            Algorithm::ReturnCapping => self.min_cap.resolve(self.env),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let c = &self.algo;
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut out = String::new();
        out.push_str("[experiment]\n");
        out.push_str(&format!("env = {}\n", self.env));
        out.push_str(&format!("algorithm = {}\n", self.algorithm));
        out.push_str(&format!("seeds = {}\n", seeds.join(", ")));
        out.push_str(&format!("output = {}\n", self.output.display()));
        out.push_str("\n[training]\n");
        for (key, value) in [
            ("alpha", format!("{:?}", c.alpha)),
            ("gamma", format!("{:?}", c.gamma)),
            ("gae_lambda", format!("{:?}", c.gae_lambda)),
            ("clip_epsilon", format!("{:?}", c.clip_epsilon)),
            ("entropy_coeff", format!("{:?}", c.entropy_coeff)),
            ("learning_rate", format!("{:?}", c.learning_rate)),
            ("batch_env_steps", c.batch_env_steps.to_string()),
            ("epochs_per_batch", c.epochs_per_batch.to_string()),
            ("sub_batch_size", c.sub_batch_size.to_string()),
            ("updates", c.updates.to_string()),
            ("fairness_mode", c.fairness_mode.name().to_string()),
            ("cap_eta", format!("{:?}", c.cap_eta)),
            ("normalize_advantages", c.normalize_advantages.to_string()),
            ("min_cap", self.min_cap.to_string()),
            ("checkpoint_every", self.checkpoint_every.to_string()),
            ("record_wall_time", self.record_wall_time.to_string()),
        ] {
            out.push_str(&format!("{key} = {value}\n"));
        }
        out.push_str("\n[evaluation]\n");
        out.push_str(&format!("episodes = {}\n", self.eval_episodes));
        out.push_str(&format!("every = {}\n", self.eval_every));
        out
    }
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split([';', '#']).next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("unterminated section header {body:?}")))?
                .trim();
            if !["experiment", "training", "evaluation"].contains(&name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key = value, found {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(err(line, format!("expected key = value, found {body:?}")));
        }
        let section = section
            .clone()
            .ok_or_else(|| err(line, format!("key {key:?} appears before any section header")))?;
        if let Some(prev) = out.iter().find(|e| e.section == section && e.key == key) {
            return Err(err(line, format!("{key} already set on line {}", prev.line)));
        }
        out.push(Entry {
            line,
            section,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

fn number<T: FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, format!("{} expects a number, got {:?}", e.key, e.value)))
}

fn positive(e: &Entry) -> Result<usize, ConfigError> {
    match number::<usize>(e)? {
        0 => Err(err(e.line, format!("{} must be at least 1", e.key))),
        v => Ok(v),
    }
}

fn boolean(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        v => Err(err(e.line, format!("{} expects true or false, got {v:?}", e.key))),
    }
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let entries = entries(text)?;
    let find = |key: &str| entries.iter().find(|e| e.section == "experiment" && e.key == key);
    let env_entry = find("env").ok_or_else(|| err(1, "[experiment] must set env"))?;
    let env: EnvKind = env_entry.value.parse().map_err(|e| err(env_entry.line, format!("{e}")))?;
    let algo_entry = find("algorithm").ok_or_else(|| err(1, "[experiment] must set algorithm"))?;
    let algorithm: Algorithm = algo_entry.value.parse().map_err(|e| err(algo_entry.line, format!("{e}")))?;
    let mut cfg = ExperimentConfig::new(env, algorithm);
    for e in &entries {
        let c = &mut cfg.algo;
        match (e.section.as_str(), e.key.as_str()) {
            ("experiment", "env" | "algorithm") => {}
            ("experiment", "seeds") => {
                let mut seeds = Vec::new();
                for s in e.value.split(',') {
                    let s = s.trim();
                    let seed: u64 = s
                        .parse()
                        .map_err(|_| err(e.line, format!("seeds expects integers, got {s:?}")))?;
                    if seeds.contains(&seed) {
                        return Err(err(e.line, format!("seed {seed} listed twice")));
                    }
                    seeds.push(seed);
                }
                cfg.seeds = seeds;
            }
            ("experiment", "output") => cfg.output = PathBuf::from(&e.value),
            ("training", "alpha") => c.alpha = number(e)?,
            ("training", "gamma") => c.gamma = number(e)?,
            ("training", "gae_lambda") => c.gae_lambda = number(e)?,
            ("training", "clip_epsilon") => c.clip_epsilon = number(e)?,
            ("training", "entropy_coeff") => c.entropy_coeff = number(e)?,
            ("training", "learning_rate") => c.learning_rate = number(e)?,
            ("training", "batch_env_steps") => c.batch_env_steps = number(e)?,
            ("training", "epochs_per_batch") => c.epochs_per_batch = number(e)?,
            ("training", "sub_batch_size") => c.sub_batch_size = number(e)?,
            ("training", "updates") => c.updates = positive(e)?,
            ("training", "fairness_mode") => {
                c.fairness_mode = e.value.parse::<FairnessMode>().map_err(|x| err(e.line, x.to_string()))?
            }
            ("training", "cap_eta") => c.cap_eta = number(e)?,
            ("training", "normalize_advantages") => c.normalize_advantages = boolean(e)?,
            ("training", "min_cap") => {
                let choice: MinCapChoice = e.value.parse().map_err(|m: String| err(e.line, m))?;
                if choice.resolve(env).is_none() {
                    return Err(err(e.line, format!("no {choice} minimum cap is tabulated for {env}")));
                }
                cfg.min_cap = choice;
            }
            ("training", "checkpoint_every") => cfg.checkpoint_every = positive(e)?,
            ("training", "record_wall_time") => cfg.record_wall_time = boolean(e)?,
            ("evaluation", "episodes") => cfg.eval_episodes = positive(e)?,
            ("evaluation", "every") => cfg.eval_every = positive(e)?,
            (section, key) => return Err(err(e.line, format!("unknown key {key:?} in [{section}]"))),
        }
        // Defaults are valid, so the first failure belongs to this line.
        cfg.algo.validate().map_err(|x| err(e.line, x.to_string()))?;
    }
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}
