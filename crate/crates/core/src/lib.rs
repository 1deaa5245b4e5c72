//! Risk-averse policy-gradient training via return capping.
//!
//! The crate bundles everything needed to train and compare CVaR-seeking
//! agents on small benchmark problems:
//!
//! - [`stats`]: empirical and exact VaR/CVaR, tail selection, capped rewards.
//! - [`nn`]: small tanh MLPs with reverse-mode gradients and Adam.
//! - [`env`]: betting game, autonomous-vehicle road graph, discrete and
//!   continuous guarded mazes, and the running-return state augmentation.
//! - [`algo`]: PPO, CVaR-PG, CVaR-PPO and return-capping trainers.
//! - [`oracle`]: exhaustive policy enumeration on tiny MDPs, used to check
//!   that maximising the capped expectation recovers CVaR-optimal policies.

pub mod algo;
pub mod env;
pub mod error;
pub mod nn;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
