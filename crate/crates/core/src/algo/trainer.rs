use super::cap::CapState;
use super::config::{AlgoConfig, Algorithm};
use super::rollout::{sample_trajectories, Budget, EpisodeSeeds, Trajectory};
use super::update::{build_ppo_batch, capped_rewards, cvar_pg_update, ppo_update, UpdateReport};
use crate::env::EnvKind;
use crate::error::{Error, Result};
use crate::nn::{Adam, Mlp, MlpSpec, DEFAULT_HIDDEN};
use crate::rng::{derive_seed, rng_from, tag};
use crate::stats::ReturnBatch;
use serde::{Deserialize, Serialize};

/// Everything that identifies a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub env: EnvKind,
    pub algorithm: Algorithm,
    pub config: AlgoConfig,
    pub seed: u64,
    /// Floor of the return cap; required for return capping, ignored otherwise.
    pub min_cap: Option<f64>,
    /// Risk level used for reported statistics.
    pub report_alpha: f64,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if !(self.report_alpha > 0.0 && self.report_alpha <= 1.0) {
            return Err(Error::invalid(format!("report alpha must lie in (0, 1], got {}", self.report_alpha)));
        }
        if self.algorithm == Algorithm::ReturnCapping && self.min_cap.is_none() {
            return Err(Error::invalid("return capping needs a minimum cap"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateMetrics {
    /// 1 for the first update.
    pub update_index: usize,
    /// Nominal budget: updates so far times the per-update step budget.
    pub cumulative_env_steps: u64,
    /// Steps actually taken, including the overshoot from finishing episodes.
    pub actual_env_steps: u64,
    pub episodes: usize,
    pub train_return_mean: f64,
    pub train_cvar: f64,
    pub train_var: f64,
    /// Cap after this update's adjustment.
    pub cap: Option<f64>,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub gradient_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub returns: Vec<f64>,
    pub cvar: f64,
    pub var: f64,
    pub mean: f64,
}

/// Rolls out `policy` for `episodes` evaluation episodes with actions sampled
/// from the policy. `round` selects the action stream; the episode seeds are
/// the same for every round.
pub fn evaluate_policy(
    policy: &Mlp,
    env: EnvKind,
    episodes: usize,
    alpha: f64,
    seed: u64,
    round: u64,
) -> Result<EvalReport> {
    if episodes == 0 {
        return Err(Error::invalid("evaluation needs at least one episode"));
    }
    let expected = env.build().spec().observation_dim + 1;
    if policy.spec().input_dim != expected {
        return Err(Error::invalid(format!(
            "policy takes {} inputs but {env} observations have {expected}",
            policy.spec().input_dim
        )));
    }
    let mut rng = rng_from(seed, tag::EVAL_ACTIONS, round);
    let trajs = sample_trajectories(policy, env, Budget::Episodes(episodes), EpisodeSeeds::evaluation(seed), 0, &mut rng)?;
    let returns: Vec<f64> = trajs.iter().map(Trajectory::total_return).collect();
    let batch = ReturnBatch::new(returns.clone(), alpha)?;
    Ok(EvalReport {
        cvar: batch.cvar(),
        var: batch.var(),
        mean: batch.mean(),
        returns,
    })
}

/// Serializable snapshot sufficient to resume a run bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerState {
    pub run: RunSpec,
    pub policy_spec: MlpSpec,
    pub policy_values: Vec<f64>,
    pub value_spec: MlpSpec,
    pub value_values: Vec<f64>,
    pub policy_opt: Adam,
    pub value_opt: Adam,
    pub cap: Option<CapState>,
    pub updates_done: usize,
    pub episodes_sampled: u64,
    pub env_steps: u64,
}

pub struct Trainer {
    run: RunSpec,
    policy: Mlp,
    value: Mlp,
    policy_opt: Adam,
    value_opt: Adam,
    cap: Option<CapState>,
    updates_done: usize,
    episodes_sampled: u64,
    env_steps: u64,
}

impl Trainer {
    pub fn new(run: RunSpec) -> Result<Self> {
        run.validate()?;
        let spec = run.env.build().spec().clone();
        let input = spec.observation_dim + 1;
        let policy = Mlp::new(
            MlpSpec::new(input, DEFAULT_HIDDEN.to_vec(), spec.action_count),
            derive_seed(run.seed, tag::INIT_POLICY, 0),
        )?;
        let value = Mlp::new(
            MlpSpec::new(input, DEFAULT_HIDDEN.to_vec(), 1),
            derive_seed(run.seed, tag::INIT_VALUE, 0),
        )?;
        let lr = run.config.learning_rate;
        let cap = match (run.algorithm, run.min_cap) {
            (Algorithm::ReturnCapping, Some(m)) => Some(CapState::new(m, run.config.cap_eta)?),
            _ => None,
        };
        Ok(Self {
            policy_opt: Adam::new(policy.params().len(), lr),
            value_opt: Adam::new(value.params().len(), lr),
            policy,
            value,
            cap,
            run,
            updates_done: 0,
            episodes_sampled: 0,
            env_steps: 0,
        })
    }

    pub fn run_spec(&self) -> &RunSpec {
        &self.run
    }

    pub fn policy(&self) -> &Mlp {
        &self.policy
    }

    pub fn value(&self) -> &Mlp {
        &self.value
    }

    pub fn cap(&self) -> Option<CapState> {
        self.cap
    }

    pub fn updates_done(&self) -> usize {
        self.updates_done
    }

    pub fn finished(&self) -> bool {
        self.updates_done >= self.run.config.updates
    }

    /// Samples one batch and applies one update of the configured algorithm.
    pub fn step(&mut self) -> Result<UpdateMetrics> {
        let run = &self.run;
        let cfg = &run.config;
        let index = self.updates_done as u64;
        let budget = cfg.env_steps_per_update(run.algorithm);
        let mut action_rng = rng_from(run.seed, tag::ACTIONS, index);
        let trajs = sample_trajectories(
            &self.policy,
            run.env,
            Budget::Steps(budget),
            EpisodeSeeds::training(run.seed),
            self.episodes_sampled,
            &mut action_rng,
        )?;
        let returns: Vec<f64> = trajs.iter().map(Trajectory::total_return).collect();
        let reported = ReturnBatch::new(returns.clone(), run.report_alpha)?;
        let at_alpha = ReturnBatch::new(returns, cfg.alpha)?;

        let mut report = UpdateReport::default();
        let mut gradient_norm = None;
        let mut shuffle_rng = rng_from(run.seed, tag::SHUFFLE, index);
        match run.algorithm {
            Algorithm::CvarPg => {
                gradient_norm = Some(cvar_pg_update(&mut self.policy, &mut self.policy_opt, &trajs, cfg.alpha)?);
            }
            algo => {
                let (rewards, include) = match algo {
                    Algorithm::ReturnCapping => {
                        let cap = self.cap.expect("validated").cap;
                        (capped_rewards(&trajs, cap)?, vec![true; trajs.len()])
                    }
                    Algorithm::CvarPpo => (trajs.iter().map(|t| t.rewards.clone()).collect(), at_alpha.tail_mask()),
                    _ => (trajs.iter().map(|t| t.rewards.clone()).collect(), vec![true; trajs.len()]),
                };
                let batch = build_ppo_batch(&trajs, &rewards, &include, &self.value, cfg)?;
                report = ppo_update(
                    &mut self.policy,
                    &mut self.value,
                    &mut self.policy_opt,
                    &mut self.value_opt,
                    &batch,
                    cfg,
                    &mut shuffle_rng,
                )?;
            }
        }
        if let Some(cap) = self.cap.as_mut() {
            cap.update(at_alpha.var());
        }

        let steps: usize = trajs.iter().map(Trajectory::len).sum();
        self.updates_done += 1;
        self.episodes_sampled += trajs.len() as u64;
        self.env_steps += steps as u64;
        Ok(UpdateMetrics {
            update_index: self.updates_done,
            cumulative_env_steps: (self.updates_done * budget) as u64,
            actual_env_steps: self.env_steps,
            episodes: trajs.len(),
            train_return_mean: reported.mean(),
            train_cvar: reported.cvar(),
            train_var: reported.var(),
            cap: self.cap.map(|c| c.cap),
            policy_loss: report.policy_loss,
            value_loss: report.value_loss,
            entropy: report.entropy,
            gradient_norm,
        })
    }

    /// Evaluates the current policy; the action stream depends on the number
    /// of updates done so far.
    pub fn evaluate(&self, episodes: usize) -> Result<EvalReport> {
        evaluate_policy(
            &self.policy,
            self.run.env,
            episodes,
            self.run.report_alpha,
            self.run.seed,
            self.updates_done as u64,
        )
    }

    pub fn state(&self) -> TrainerState {
        TrainerState {
            run: self.run.clone(),
            policy_spec: self.policy.spec().clone(),
            policy_values: self.policy.params().values().to_vec(),
            value_spec: self.value.spec().clone(),
            value_values: self.value.params().values().to_vec(),
            policy_opt: self.policy_opt.clone(),
            value_opt: self.value_opt.clone(),
            cap: self.cap,
            updates_done: self.updates_done,
            episodes_sampled: self.episodes_sampled,
            env_steps: self.env_steps,
        }
    }

    pub fn from_state(state: TrainerState) -> Result<Self> {
        state.run.validate()?;
        let policy = Mlp::from_values(state.policy_spec, state.policy_values)?;
        let value = Mlp::from_values(state.value_spec, state.value_values)?;
        if state.policy_opt.len() != policy.params().len() || state.value_opt.len() != value.params().len() {
            return Err(Error::State("optimizer state does not match the networks".into()));
        }
        Ok(Self {
            run: state.run,
            policy,
            value,
            policy_opt: state.policy_opt,
            value_opt: state.value_opt,
            cap: state.cap,
            updates_done: state.updates_done,
            episodes_sampled: state.episodes_sampled,
            env_steps: state.env_steps,
        })
    }
}
