//! Benchmark environments behind one episodic interface.
//!
//! Every environment re-seeds its private random stream on [`Environment::reset`],
//! so an episode is fully determined by the reset seed and the action sequence.

mod augment;
mod av;
mod betting;
pub mod layout;
mod maze;

pub use augment::{Augmented, AugmentedObservation};
pub use av::AvGraph;
pub use betting::BettingGame;
pub use maze::{ContinuousMaze, DiscreteMaze};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvKind {
    Betting,
    Av,
    MazeDiscrete,
    MazeContinuous,
}

impl EnvKind {
    pub const ALL: [EnvKind; 4] = [
        EnvKind::Betting,
        EnvKind::Av,
        EnvKind::MazeDiscrete,
        EnvKind::MazeContinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Betting => "betting",
            EnvKind::Av => "av",
            EnvKind::MazeDiscrete => "maze_discrete",
            EnvKind::MazeContinuous => "maze_continuous",
        }
    }

    pub fn build(self) -> Box<dyn Environment> {
        match self {
            EnvKind::Betting => Box::new(BettingGame::new()),
            EnvKind::Av => Box::new(AvGraph::shipped()),
            EnvKind::MazeDiscrete => Box::new(DiscreteMaze::shipped()),
            EnvKind::MazeContinuous => Box::new(ContinuousMaze::shipped()),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown environment {s:?}")))
    }
}

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub observation_dim: usize,
    pub action_count: usize,
    pub max_steps: usize,
    /// Divisor applied to the running return before it is fed to a policy.
    pub return_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub next_observation: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
    /// Set exactly when the step limit ends a non-terminal episode.
    pub truncated: bool,
}

impl Transition {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts a new episode whose randomness is derived from `seed`.
    fn reset(&mut self, seed: u64) -> Vec<f64>;

    fn step(&mut self, action: usize) -> Result<Transition>;
}

impl Environment for Box<dyn Environment> {
    fn spec(&self) -> &EnvSpec {
        (**self).spec()
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        (**self).reset(seed)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        (**self).step(action)
    }
}

/// Wraps an environment so its observations carry the running return.
pub fn augment<E: Environment>(env: E) -> Augmented<E> {
    Augmented::new(env)
}

pub(crate) fn check_action(spec: &EnvSpec, action: usize) -> Result<()> {
    if action >= spec.action_count {
        Err(Error::invalid(format!(
            "action {action} out of range for {} ({} actions)",
            spec.kind, spec.action_count
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn finished_episode(kind: EnvKind) -> Error {
    Error::State(format!("{kind}: step called on a finished episode; reset first"))
}
