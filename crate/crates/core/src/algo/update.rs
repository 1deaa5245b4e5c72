use super::config::AlgoConfig;
use super::gae::{gae_advantages, normalize};
use super::loss::{cvar_pg_weights, ppo_policy_loss, value_loss, weighted_log_prob_loss};
use super::rollout::Trajectory;
use crate::error::{Error, Result};
use crate::nn::{stack_rows, Adam, Mlp};
use crate::stats::cap_rewards;
use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

/// Flattened steps ready for clipped-surrogate epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoBatch {
    pub features: Array2<f64>,
    pub actions: Vec<usize>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub value_targets: Vec<f64>,
    /// Number of episodes the steps came from.
    pub episodes: usize,
}

impl PpoBatch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Builds a batch from the selected episodes, using `rewards[i]` in place of
/// episode `i`'s raw rewards.
pub fn build_ppo_batch(
    trajectories: &[Trajectory],
    rewards: &[Vec<f64>],
    include: &[bool],
    value: &Mlp,
    config: &AlgoConfig,
) -> Result<PpoBatch> {
    if rewards.len() != trajectories.len() || include.len() != trajectories.len() {
        return Err(Error::invalid("reward and selection lists must match the trajectories"));
    }
    let width = value.spec().input_dim;
    let mut rows = Vec::new();
    let mut actions = Vec::new();
    let mut old_log_probs = Vec::new();
    let mut advantages = Vec::new();
    let mut value_targets = Vec::new();
    let mut episodes = 0;
    for ((traj, r), _) in trajectories.iter().zip(rewards).zip(include).filter(|(_, &inc)| inc) {
        episodes += 1;
        let mut inputs = traj.features.clone();
        inputs.push(traj.final_features.clone());
        let predicted = value.predict_batch(stack_rows(&inputs, width).view())?;
        let v: Vec<f64> = predicted.column(0).to_vec();
        let bootstrap = if traj.terminated { 0.0 } else { v[traj.len()] };
        let (adv, targets) = gae_advantages(r, &v[..traj.len()], bootstrap, config.gamma, config.gae_lambda)?;
        rows.extend(traj.features.iter().cloned());
        actions.extend_from_slice(&traj.actions);
        old_log_probs.extend_from_slice(&traj.log_probs);
        advantages.extend(adv);
        value_targets.extend(targets);
    }
    if config.normalize_advantages {
        normalize(&mut advantages);
    }
    Ok(PpoBatch {
        features: stack_rows(&rows, width),
        actions,
        old_log_probs,
        advantages,
        value_targets,
        episodes,
    })
}

/// Averages over all sub-batch steps of one update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateReport {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub gradient_steps: usize,
}

/// Clipped-surrogate epochs over shuffled sub-batches of steps.
pub fn ppo_update<R: Rng + ?Sized>(
    policy: &mut Mlp,
    value: &mut Mlp,
    policy_opt: &mut Adam,
    value_opt: &mut Adam,
    batch: &PpoBatch,
    config: &AlgoConfig,
    rng: &mut R,
) -> Result<UpdateReport> {
    let mut report = UpdateReport::default();
    if batch.is_empty() {
        return Ok(report);
    }
    let mut order: Vec<usize> = (0..batch.len()).collect();
    for _ in 0..config.epochs_per_batch {
        order.shuffle(rng);
        for chunk in order.chunks(config.sub_batch_size) {
            let x = batch.features.select(Axis(0), chunk);
            let pick = |v: &[f64]| chunk.iter().map(|&i| v[i]).collect::<Vec<f64>>();
            let actions: Vec<usize> = chunk.iter().map(|&i| batch.actions[i]).collect();
            let s = ppo_policy_loss(
                policy,
                x.view(),
                &actions,
                &pick(&batch.old_log_probs),
                &pick(&batch.advantages),
                config.clip_epsilon,
                config.entropy_coeff,
                true,
            )?;
            policy_opt.step(policy.params_mut());
            let vl = value_loss(value, x.view(), &pick(&batch.value_targets), true)?;
            value_opt.step(value.params_mut());
            report.policy_loss += s.loss;
            report.entropy += s.entropy;
            report.clip_fraction += s.clip_fraction;
            report.value_loss += vl;
            report.gradient_steps += 1;
        }
    }
    let n = report.gradient_steps as f64;
    report.policy_loss /= n;
    report.value_loss /= n;
    report.entropy /= n;
    report.clip_fraction /= n;
    Ok(report)
}

/// One full-batch CVaR policy-gradient step. Returns the gradient norm.
pub fn cvar_pg_update(
    policy: &mut Mlp,
    policy_opt: &mut Adam,
    trajectories: &[Trajectory],
    alpha: f64,
) -> Result<f64> {
    let returns: Vec<f64> = trajectories.iter().map(Trajectory::total_return).collect();
    let episode_weights = cvar_pg_weights(&returns, alpha)?;
    let mut rows = Vec::new();
    let mut actions = Vec::new();
    let mut weights = Vec::new();
    for (traj, &w) in trajectories.iter().zip(&episode_weights) {
        if w == 0.0 {
            continue;
        }
        rows.extend(traj.features.iter().cloned());
        actions.extend_from_slice(&traj.actions);
        weights.extend(std::iter::repeat_n(w, traj.len()));
    }
    policy.params_mut().zero_grads();
    if !rows.is_empty() {
        let x = stack_rows(&rows, policy.spec().input_dim);
        weighted_log_prob_loss(policy, x.view(), &actions, &weights, true)?;
    }
    let norm = policy.params().grads().iter().map(|g| g * g).sum::<f64>().sqrt();
    policy_opt.step(policy.params_mut());
    Ok(norm)
}

/// Per-episode rewards after capping each return at `cap`.
pub fn capped_rewards(trajectories: &[Trajectory], cap: f64) -> Result<Vec<Vec<f64>>> {
    trajectories.iter().map(|t| cap_rewards(&t.rewards, cap)).collect()
}
