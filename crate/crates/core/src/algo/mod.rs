//! PPO, CVaR-PPO, CVaR policy gradient and return-capped PPO trainers.

mod cap;
mod config;
mod gae;
mod loss;
mod rollout;
mod trainer;
mod update;

pub use cap::{update_cap, CapState};
pub use config::{report_alpha, AlgoConfig, Algorithm, FairnessMode};
pub use gae::{gae_advantages, normalize};
pub use loss::{cvar_pg_weights, ppo_policy_loss, value_loss, weighted_log_prob_loss, SurrogateReport};
pub use rollout::{sample_trajectories, Budget, EpisodeSeeds, Trajectory, LANES};
pub use trainer::{evaluate_policy, EvalReport, RunSpec, Trainer, TrainerState, UpdateMetrics};
pub use update::{build_ppo_batch, capped_rewards, cvar_pg_update, ppo_update, PpoBatch, UpdateReport};
