//! Batch losses with hand-derived gradients.
//!
//! Each function evaluates the loss on the given rows and, when `backprop` is
//! set, accumulates its parameter gradient into the network's buffer.

use crate::error::{Error, Result};
use crate::nn::{categorical_head, Mlp};
use crate::stats::ReturnBatch;
use ndarray::{Array2, ArrayView2};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurrogateReport {
    /// Value minimised: `-(surrogate + entropy_coeff * entropy)`.
    pub loss: f64,
    /// Mean clipped surrogate.
    pub surrogate: f64,
    pub entropy: f64,
    /// Fraction of rows whose ratio left the clip interval.
    pub clip_fraction: f64,
}

fn check_rows(name: &str, rows: usize, len: usize) -> Result<()> {
    if rows != len {
        return Err(Error::invalid(format!("{name} has {len} entries for {rows} rows")));
    }
    Ok(())
}

fn outputs(net: &mut Mlp, features: ArrayView2<'_, f64>, backprop: bool) -> Result<Array2<f64>> {
    if backprop {
        net.forward_batch(features)
    } else {
        net.predict_batch(features)
    }
}

/// Clipped surrogate objective with an entropy bonus, averaged over rows.
#[allow(clippy::too_many_arguments)]
pub fn ppo_policy_loss(
    policy: &mut Mlp,
    features: ArrayView2<'_, f64>,
    actions: &[usize],
    old_log_probs: &[f64],
    advantages: &[f64],
    clip_epsilon: f64,
    entropy_coeff: f64,
    backprop: bool,
) -> Result<SurrogateReport> {
    let rows = features.nrows();
    check_rows("actions", rows, actions.len())?;
    check_rows("old_log_probs", rows, old_log_probs.len())?;
    check_rows("advantages", rows, advantages.len())?;
    if rows == 0 {
        return Ok(SurrogateReport::default());
    }
    let logits = outputs(policy, features, backprop)?;
    let b = rows as f64;
    let mut grad = Array2::zeros(logits.dim());
    let (mut surrogate, mut entropy, mut clipped) = (0.0, 0.0, 0usize);
    for i in 0..rows {
        let (p, lp) = categorical_head(logits.row(i).as_slice().expect("row-major"));
        let a = actions[i];
        let adv = advantages[i];
        let ratio = (lp[a] - old_log_probs[i]).exp();
        let bounded = ratio.clamp(1.0 - clip_epsilon, 1.0 + clip_epsilon);
        if bounded != ratio {
            clipped += 1;
        }
        let unclipped_active = ratio * adv <= bounded * adv;
        surrogate += if unclipped_active { ratio * adv } else { bounded * adv };
        let h: f64 = -p.iter().zip(&lp).map(|(p, l)| p * l).sum::<f64>();
        entropy += h;
        if backprop {
            let mut row = grad.row_mut(i);
            for k in 0..p.len() {
                let onehot = if k == a { 1.0 } else { 0.0 };
                let d_surr = if unclipped_active { adv * ratio * (onehot - p[k]) } else { 0.0 };
                let d_ent = -p[k] * (lp[k] + h);
                row[k] = -(d_surr + entropy_coeff * d_ent) / b;
            }
        }
    }
    if backprop {
        policy.backward_batch(grad.view())?;
    }
    surrogate /= b;
    entropy /= b;
    Ok(SurrogateReport {
        loss: -(surrogate + entropy_coeff * entropy),
        surrogate,
        entropy,
        clip_fraction: clipped as f64 / b,
    })
}

/// Mean squared error of a scalar critic.
pub fn value_loss(
    value: &mut Mlp,
    features: ArrayView2<'_, f64>,
    targets: &[f64],
    backprop: bool,
) -> Result<f64> {
    let rows = features.nrows();
    check_rows("targets", rows, targets.len())?;
    if rows == 0 {
        return Ok(0.0);
    }
    let out = outputs(value, features, backprop)?;
    let b = rows as f64;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(out.dim());
    for i in 0..rows {
        let err = out[[i, 0]] - targets[i];
        loss += err * err;
        grad[[i, 0]] = 2.0 * err / b;
    }
    if backprop {
        value.backward_batch(grad.view())?;
    }
    Ok(loss / b)
}

/// `-Σ_i w_i log π(a_i | s_i)`.
pub fn weighted_log_prob_loss(
    policy: &mut Mlp,
    features: ArrayView2<'_, f64>,
    actions: &[usize],
    weights: &[f64],
    backprop: bool,
) -> Result<f64> {
    let rows = features.nrows();
    check_rows("actions", rows, actions.len())?;
    check_rows("weights", rows, weights.len())?;
    if rows == 0 {
        return Ok(0.0);
    }
    let logits = outputs(policy, features, backprop)?;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(logits.dim());
    for i in 0..rows {
        let (p, lp) = categorical_head(logits.row(i).as_slice().expect("row-major"));
        let (a, w) = (actions[i], weights[i]);
        loss -= w * lp[a];
        let mut row = grad.row_mut(i);
        for k in 0..p.len() {
            let onehot = if k == a { 1.0 } else { 0.0 };
            row[k] = -w * (onehot - p[k]);
        }
    }
    if backprop {
        policy.backward_batch(grad.view())?;
    }
    Ok(loss)
}

/// Per-episode weights of the CVaR policy gradient:
/// `1[R_i ≤ VaR] (R_i − VaR) / (α N)`, tail chosen by sorted position.
pub fn cvar_pg_weights(returns: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let batch = ReturnBatch::new(returns.to_vec(), alpha)?;
    let var = batch.var();
    let norm = alpha * returns.len() as f64;
    Ok(batch
        .tail_mask()
        .iter()
        .zip(returns)
        .map(|(&tail, &r)| if tail { (r - var) / norm } else { 0.0 })
        .collect())
}
