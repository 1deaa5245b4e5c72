//! Experiment orchestration for return-capped CVaR training: configuration
//! files, per-seed training runs with resumable checkpoints, checkpoint
//! evaluation, plot data and exact-oracle reports.

pub mod config;
pub mod eval;
pub mod experiment;
mod fsutil;
pub mod metrics;
pub mod oracle_report;
pub mod plotdata;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, MinCapChoice};
pub use eval::{evaluate_checkpoint, EvalRequest};
pub use experiment::{output_root, run_experiment, run_seed, RunError, RunOptions, SeedOutcome, OUTPUT_ROOT_VAR};
pub use fsutil::write_atomic;
pub use plotdata::emit_plotdata;
