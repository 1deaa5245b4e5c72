use crate::env::EnvKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    Ppo,
    CvarPg,
    CvarPpo,
    ReturnCapping,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Ppo,
        Algorithm::ReturnCapping,
        Algorithm::CvarPpo,
        Algorithm::CvarPg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ppo => "ppo",
            Algorithm::CvarPg => "cvar_pg",
            Algorithm::CvarPpo => "cvar_ppo",
            Algorithm::ReturnCapping => "return_capping",
        }
    }

    /// Algorithms that train on the lower tail of each batch only.
    pub fn filters_tail(self) -> bool {
        matches!(self, Algorithm::CvarPg | Algorithm::CvarPpo)
    }

    fn column(self) -> usize {
        match self {
            Algorithm::Ppo => 0,
            Algorithm::ReturnCapping => 1,
            Algorithm::CvarPpo => 2,
            Algorithm::CvarPg => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

/// How tail-filtering baselines are budgeted against the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FairnessMode {
    /// Every algorithm samples `batch_env_steps` per update.
    EqualEnvSteps,
    /// Tail-filtering algorithms sample `batch_env_steps / alpha` per update so
    /// that their filtered batch matches the unfiltered one.
    EqualUpdates,
}

impl FairnessMode {
    pub fn name(self) -> &'static str {
        match self {
            FairnessMode::EqualEnvSteps => "equal_env_steps",
            FairnessMode::EqualUpdates => "equal_updates",
        }
    }
}

impl FromStr for FairnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal_env_steps" => Ok(FairnessMode::EqualEnvSteps),
            "equal_updates" => Ok(FairnessMode::EqualUpdates),
            _ => Err(Error::invalid(format!("unknown fairness mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub entropy_coeff: f64,
    pub learning_rate: f64,
    pub batch_env_steps: usize,
    pub epochs_per_batch: usize,
    pub sub_batch_size: usize,
    pub updates: usize,
    pub fairness_mode: FairnessMode,
    pub cap_eta: f64,
    /// Standardize advantages over each PPO batch.
    #[serde(default)]
    pub normalize_advantages: bool,
}

/// One environment's hyperparameter table. Columns are PPO, Return Capping,
/// CVaR-PPO, CVaR-PG; `None` cells inherit the PPO column.
struct Table {
    alpha: [f64; 4],
    updates: [Option<usize>; 4],
    steps: [Option<usize>; 4],
    epochs: usize,
    sub_batch: [Option<usize>; 4],
    eta: f64,
}

fn table(env: EnvKind) -> Table {
    match env {
        EnvKind::Betting => Table {
            alpha: [1.0, 0.2, 0.2, 0.2],
            updates: [Some(200), None, None, None],
            steps: [Some(5000), None, None, None],
            epochs: 5,
            sub_batch: [Some(50), None, None, Some(1000)],
            eta: 0.2,
        },
        EnvKind::Av => Table {
            alpha: [1.0, 0.05, 0.05, 0.05],
            updates: [Some(400), None, Some(200), Some(66)],
            steps: [Some(1000), None, Some(2000), Some(6000)],
            epochs: 1,
            sub_batch: [Some(50), None, None, Some(300)],
            eta: 0.6,
        },
        EnvKind::MazeContinuous => Table {
            alpha: [1.0, 0.05, 0.05, 0.05],
            updates: [Some(100), None, Some(200), Some(66)],
            steps: [Some(10000), None, None, None],
            epochs: 6,
            sub_batch: [Some(50), None, None, Some(500)],
            eta: 0.2,
        },
        EnvKind::MazeDiscrete => Table {
            alpha: [1.0, 0.2, 0.2, 0.2],
            updates: [Some(100), None, Some(40), Some(40)],
            steps: [Some(1000), None, Some(5000), None],
            epochs: 6,
            sub_batch: [Some(50), None, None, Some(1000)],
            eta: 0.2,
        },
    }
}

fn cell<T: Copy>(row: &[Option<T>; 4], col: usize) -> T {
    row[col].or(row[0]).expect("first column always filled")
}

/// The risk level results are reported at for an environment.
pub fn report_alpha(env: EnvKind) -> f64 {
    table(env).alpha[1]
}

impl AlgoConfig {
    /// Defaults from the environment's hyperparameter table.
    pub fn defaults(env: EnvKind, algorithm: Algorithm) -> Self {
        let t = table(env);
        let col = algorithm.column();
        Self {
            alpha: t.alpha[col],
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            entropy_coeff: 1e-5,
            learning_rate: 1e-3,
            batch_env_steps: cell(&t.steps, col),
            epochs_per_batch: t.epochs,
            sub_batch_size: cell(&t.sub_batch, col),
            updates: cell(&t.updates, col),
            fairness_mode: FairnessMode::EqualEnvSteps,
            cap_eta: t.eta,
            normalize_advantages: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, lo_open: bool| {
            let ok = v.is_finite() && v <= 1.0 && if lo_open { v > 0.0 } else { v >= 0.0 };
            if ok {
                Ok(())
            } else {
                let range = if lo_open { "(0, 1]" } else { "[0, 1]" };
                Err(Error::invalid(format!("{name} must lie in {range}, got {v}")))
            }
        };
        unit("alpha", self.alpha, true)?;
        unit("gamma", self.gamma, false)?;
        unit("gae_lambda", self.gae_lambda, false)?;
        unit("cap_eta", self.cap_eta, false)?;
        if !(self.clip_epsilon.is_finite() && self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return Err(Error::invalid(format!("clip_epsilon must lie in (0, 1), got {}", self.clip_epsilon)));
        }
        if !(self.entropy_coeff.is_finite() && self.entropy_coeff >= 0.0) {
            return Err(Error::invalid(format!("entropy_coeff must be non-negative, got {}", self.entropy_coeff)));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        for (name, v) in [
            ("batch_env_steps", self.batch_env_steps),
            ("epochs_per_batch", self.epochs_per_batch),
            ("sub_batch_size", self.sub_batch_size),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Environment steps sampled per update once the fairness mode is applied.
    pub fn env_steps_per_update(&self, algorithm: Algorithm) -> usize {
        match self.fairness_mode {
            FairnessMode::EqualUpdates if algorithm.filters_tail() => {
                (self.batch_env_steps as f64 / self.alpha - 1e-9).ceil() as usize
            }
            _ => self.batch_env_steps,
        }
    }
}
