//! Tail statistics of return samples and exact return distributions.
//!
//! Empirical estimators work on whole samples: the tail of a batch of `N`
//! returns at level `alpha` is the `⌈alpha·N⌉` smallest returns, with ties
//! broken by the lower original index. The exact routines on
//! [`ExactDistribution`] instead weight the boundary atom fractionally so
//! the tail carries probability mass of exactly `alpha`.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Tolerance used when comparing accumulated probabilities against `alpha`.
const CDF_TOL: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// Number of samples in the lower tail of `n` samples at level `alpha`.
///
/// `alpha * n` can land a hair above an integer (`0.7 * 10 == 7.000000000000001`),
/// so the product is nudged down by `1e-9` before taking the ceiling.
pub fn tail_count(alpha: f64, n: usize) -> usize {
    let raw = alpha * n as f64;
    ((raw - 1e-9).ceil() as usize).clamp(1, n.max(1))
}

/// Episode returns of one batch together with the risk level.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnBatch {
    returns: Vec<f64>,
    alpha: f64,
    /// Indices sorted by (return, index) ascending.
    order: Vec<usize>,
}

impl ReturnBatch {
    pub fn new(returns: Vec<f64>, alpha: f64) -> Result<Self> {
        if returns.is_empty() {
            return Err(Error::invalid("return batch is empty"));
        }
        check_alpha(alpha)?;
        if let Some(bad) = returns.iter().find(|r| !r.is_finite()) {
            return Err(Error::invalid(format!("non-finite return {bad}")));
        }
        let mut order: Vec<usize> = (0..returns.len()).collect();
        // Stable sort keeps equal returns in index order.
        order.sort_by(|&a, &b| returns[a].partial_cmp(&returns[b]).unwrap_or(Ordering::Equal));
        Ok(Self {
            returns,
            alpha,
            order,
        })
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn tail_count(&self) -> usize {
        tail_count(self.alpha, self.returns.len())
    }

    /// Original indices of the tail samples, lowest return first.
    pub fn tail_indices(&self) -> &[usize] {
        &self.order[..self.tail_count()]
    }

    pub fn var(&self) -> f64 {
        self.returns[self.order[self.tail_count() - 1]]
    }

    pub fn cvar(&self) -> f64 {
        let tail = self.tail_indices();
        let sum: f64 = tail.iter().map(|&i| self.returns[i]).sum();
        sum / tail.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.returns.iter().sum::<f64>() / self.returns.len() as f64
    }

    pub fn tail_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.returns.len()];
        for &i in self.tail_indices() {
            mask[i] = true;
        }
        mask
    }
}

/// Value at risk: the return at ascending-sorted position `⌈alpha·N⌉ − 1`.
pub fn empirical_var(returns: &[f64], alpha: f64) -> Result<f64> {
    Ok(ReturnBatch::new(returns.to_vec(), alpha)?.var())
}

/// Mean of the `⌈alpha·N⌉` smallest returns.
pub fn empirical_cvar(returns: &[f64], alpha: f64) -> Result<f64> {
    Ok(ReturnBatch::new(returns.to_vec(), alpha)?.cvar())
}

pub fn tail_mask(returns: &[f64], alpha: f64) -> Result<Vec<bool>> {
    Ok(ReturnBatch::new(returns.to_vec(), alpha)?.tail_mask())
}

/// Redistributes per-step rewards so that every running sum of the output
/// equals `min(running sum of the input, cap)`.
///
/// Adjusted reward `t` is `min(R_t, C) − min(R_{t−1}, C)` with `R_{−1} = 0`.
/// Running sums are taken left to right in floating point. While the raw
/// running sum has never exceeded the cap the rewards pass through as-is;
/// afterwards each output is nudged by a few ulps where needed so that
/// summing the output the same way reproduces the capped running sums. The
/// identity is bit-exact whenever the rewards and cap share a binary grid
/// (integers, multiples of 1/64, token fractions), and holds to within an
/// ulp of the running-sum magnitude otherwise.
pub fn cap_rewards(rewards: &[f64], cap: f64) -> Result<Vec<f64>> {
    if !cap.is_finite() {
        return Err(Error::invalid(format!("cap must be finite, got {cap}")));
    }
    let mut out = Vec::with_capacity(rewards.len());
    let mut raw_sum = 0.0_f64;
    let mut capped_sum = 0.0_f64;
    // Until the running sum first exceeds the cap, rewards pass through untouched.
    let mut below_so_far = true;
    for &r in rewards {
        if !r.is_finite() {
            return Err(Error::invalid(format!("non-finite reward {r}")));
        }
        raw_sum += r;
        below_so_far &= raw_sum <= cap;
        if below_so_far {
            capped_sum += r;
            out.push(r);
            continue;
        }
        let target = raw_sum.min(cap);
        let mut adjusted = target - capped_sum;
        if capped_sum + adjusted != target {
            adjusted = nudge_to_target(capped_sum, adjusted, target);
        }
        capped_sum += adjusted;
        out.push(adjusted);
    }
    Ok(out)
}

fn nudge_to_target(base: f64, guess: f64, target: f64) -> f64 {
    let mut up = guess;
    let mut down = guess;
    for _ in 0..8 {
        up = up.next_up();
        if base + up == target {
            return up;
        }
        down = down.next_down();
        if base + down == target {
            return down;
        }
    }
    guess
}

/// `Σ_t gamma^t r_t`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut discount = 1.0;
    let mut total = 0.0;
    for &r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    total
}

/// A finite return distribution as (value, probability) atoms.
///
/// Atoms are kept sorted by value; values within `1e-12` of each other are
/// merged and zero-probability atoms are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    atoms: Vec<(f64, f64)>,
}

impl ExactDistribution {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("distribution has no atoms"));
        }
        let mut total = 0.0;
        for &(v, p) in &atoms {
            if !v.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!("bad atom ({v}, {p})")));
            }
            total += p;
        }
        if (total - 1.0).abs() > CDF_TOL {
            return Err(Error::invalid(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            if p == 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if (v - last.0).abs() <= 1e-12 => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        Ok(Self { atoms: merged })
    }

    /// Uniform weights over the given samples.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        let p = 1.0 / samples.len() as f64;
        // Pairwise-equal weights may sum to 1 ± a few ulps times n.
        let mut atoms: Vec<(f64, f64)> = samples.iter().map(|&v| (v, p)).collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if let Some(last) = atoms.last_mut() {
            last.1 += 1.0 - total;
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    /// `E[min(Z, cap)]`.
    pub fn capped_mean(&self, cap: f64) -> f64 {
        self.atoms.iter().map(|&(v, p)| p * v.min(cap)).sum()
    }
}

/// Exact `(VaR_alpha, CVaR_alpha)` of a discrete distribution.
///
/// VaR is `min{z | F(z) ≥ alpha}`; CVaR is `(1/alpha)∫_0^alpha VaR_x dx`,
/// which for atoms means the probability-weighted tail mean with the VaR
/// atom contributing only the mass needed to reach `alpha`.
pub fn exact_var_cvar(dist: &ExactDistribution, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let mut cum = 0.0;
    let mut weighted = 0.0;
    for &(v, p) in dist.atoms() {
        if cum + p >= alpha - CDF_TOL {
            let take = (alpha - cum).max(0.0);
            weighted += take * v;
            return Ok((v, weighted / alpha));
        }
        cum += p;
        weighted += p * v;
    }
    // Only reachable when rounding leaves the total mass just below alpha = 1.
    let (v, _) = dist.atoms()[dist.atoms().len() - 1];
    let take = (alpha - cum).max(0.0);
    Ok((v, (weighted + take * v) / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Sort-and-index reference, written independently of `ReturnBatch`.
    fn sorted_tail(returns: &[f64], alpha: f64) -> (Vec<f64>, usize) {
        let mut sorted = returns.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let k = (1..=n).find(|&k| k as f64 >= alpha * n as f64 - 1e-9).unwrap();
        (sorted, k)
    }

    #[test]
    fn var_examples() {
        let r = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (sorted, k) = sorted_tail(&r, 0.2);
        assert_eq!(sorted[k - 1], 1.0);
        assert_eq!(empirical_var(&r, 0.2).unwrap(), 1.0);
        assert_eq!(empirical_var(&[7.0, 7.0, 7.0], 0.5).unwrap(), 7.0);
        assert_eq!(empirical_var(&r, 1.0).unwrap(), 5.0);
    }

    #[test]
    fn cvar_examples() {
        let r = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (sorted, k) = sorted_tail(&r, 0.4);
        let oracle = sorted[..k].iter().sum::<f64>() / k as f64;
        assert_eq!(oracle, 1.5);
        assert_eq!(empirical_cvar(&r, 0.4).unwrap(), 1.5);
        for alpha in [0.1, 0.5, 1.0] {
            assert_eq!(empirical_cvar(&[7.0, 7.0, 7.0], alpha).unwrap(), 7.0);
        }
        assert_eq!(empirical_cvar(&r, 1.0).unwrap(), 3.0);
    }

    #[test]
    fn invalid_batches_are_rejected() {
        assert!(matches!(empirical_var(&[], 0.5), Err(Error::InvalidInput(_))));
        assert!(matches!(empirical_cvar(&[1.0], 0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(empirical_cvar(&[1.0], 1.5), Err(Error::InvalidInput(_))));
        assert!(matches!(tail_mask(&[1.0], f64::NAN), Err(Error::InvalidInput(_))));
        assert!(ReturnBatch::new(vec![1.0, f64::INFINITY], 0.5).is_err());
    }

    #[test]
    fn tail_mask_examples() {
        let m = tail_mask(&[3.0, 1.0, 2.0, 5.0, 4.0], 0.4).unwrap();
        assert_eq!(m, vec![false, true, true, false, false]);
        let m = tail_mask(&[1.0, 1.0, 1.0, 2.0], 0.25).unwrap();
        assert_eq!(m, vec![true, false, false, false]);
        let m = tail_mask(&[9.0, -3.0, 4.0], 1.0).unwrap();
        assert!(m.iter().all(|&b| b));
    }

    #[test]
    fn tail_count_handles_float_products() {
        assert_eq!(tail_count(0.7, 10), 7);
        assert_eq!(tail_count(0.2, 10), 2);
        assert_eq!(tail_count(0.05, 1), 1);
        assert_eq!(tail_count(0.21, 10), 3);
    }

    #[test]
    fn cap_rewards_examples() {
        assert_eq!(cap_rewards(&[5.0, 5.0, 5.0], 8.0).unwrap(), vec![5.0, 3.0, 0.0]);
        let out = cap_rewards(&[-1.0, -1.0, 10.0], 5.0).unwrap();
        assert_eq!(out, vec![-1.0, -1.0, 7.0]);
        assert_eq!(out.iter().sum::<f64>(), 5.0);
        assert_eq!(cap_rewards(&[2.0, 3.0], 100.0).unwrap(), vec![2.0, 3.0]);
        assert!(cap_rewards(&[1.0], f64::NAN).is_err());
        assert!(cap_rewards(&[f64::NAN], 1.0).is_err());
    }

    #[test]
    fn discounted_return_examples() {
        assert_eq!(discounted_return(&[1.0, 1.0, 1.0], 1.0), 3.0);
        assert_eq!(discounted_return(&[1.0, 1.0], 0.5), 1.5);
        // Direct power series: 8 * 0.99^2.
        let oracle = 8.0 * 0.99_f64.powi(2);
        assert!((oracle - 7.8408).abs() < 1e-12);
        assert!((discounted_return(&[0.0, 0.0, 8.0], 0.99) - 7.8408).abs() < 1e-12);
    }

    #[test]
    fn exact_var_cvar_examples() {
        let d = ExactDistribution::new(vec![(0.0, 0.5), (10.0, 0.5)]).unwrap();
        assert_eq!(exact_var_cvar(&d, 0.5).unwrap(), (0.0, 0.0));
        let (var, cvar) = exact_var_cvar(&d, 0.75).unwrap();
        assert_eq!(var, 10.0);
        assert!((cvar - (0.5 * 0.0 + 0.25 * 10.0) / 0.75).abs() < 1e-15);
        let point = ExactDistribution::new(vec![(4.0, 1.0)]).unwrap();
        for alpha in [0.01, 0.3, 1.0] {
            assert_eq!(exact_var_cvar(&point, alpha).unwrap(), (4.0, 4.0));
        }
        assert!(exact_var_cvar(&point, 0.0).is_err());
    }

    #[test]
    fn exact_distribution_normalizes() {
        let d = ExactDistribution::new(vec![(3.0, 0.25), (1.0, 0.5), (3.0 + 1e-13, 0.25), (9.0, 0.0)])
            .unwrap();
        assert_eq!(d.atoms(), &[(1.0, 0.5), (3.0, 0.5)]);
        assert!(ExactDistribution::new(vec![(1.0, 0.6)]).is_err());
        assert!(ExactDistribution::new(vec![(1.0, -0.1), (2.0, 1.1)]).is_err());
    }

    fn batch_strategy() -> impl Strategy<Value = (Vec<f64>, f64)> {
        (
            prop::collection::vec(-1000.0..1000.0_f64, 1..200),
            0.001..=1.0_f64,
        )
    }

    proptest! {
        #[test]
        fn cvar_never_exceeds_var((returns, alpha) in batch_strategy()) {
            let b = ReturnBatch::new(returns, alpha).unwrap();
            prop_assert!(b.cvar() <= b.var());
        }

        #[test]
        fn mask_count_is_ceiling((returns, alpha) in batch_strategy()) {
            let b = ReturnBatch::new(returns.clone(), alpha).unwrap();
            let (_, k) = sorted_tail(&returns, alpha);
            prop_assert_eq!(b.tail_mask().iter().filter(|&&x| x).count(), k);
        }

        #[test]
        fn shift_moves_var_and_cvar(
            returns in prop::collection::vec(-64i32..64, 1..100),
            alpha in 0.01..=1.0_f64,
            shift in -32i32..32,
        ) {
            // Integer-valued returns keep the shifted means exact.
            let base: Vec<f64> = returns.iter().map(|&r| r as f64).collect();
            let moved: Vec<f64> = base.iter().map(|r| r + shift as f64).collect();
            let a = ReturnBatch::new(base, alpha).unwrap();
            let b = ReturnBatch::new(moved, alpha).unwrap();
            prop_assert_eq!(b.var(), a.var() + shift as f64);
            let expected = a.cvar() + shift as f64;
            prop_assert!((b.cvar() - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }

        #[test]
        fn capped_prefix_sums(
            ticks in prop::collection::vec(-3200i32..3200, 0..64),
            cap_ticks in -12800i32..12800,
        ) {
            // Rewards on a 1/64 grid: every running sum is exactly representable.
            let rewards: Vec<f64> = ticks.iter().map(|&t| t as f64 / 64.0).collect();
            let cap = cap_ticks as f64 / 64.0;
            let out = cap_rewards(&rewards, cap).unwrap();
            prop_assert_eq!(out.len(), rewards.len());
            let (mut raw, mut capped) = (0.0_f64, 0.0_f64);
            for (i, (r, a)) in rewards.iter().zip(&out).enumerate() {
                raw += r;
                capped += a;
                prop_assert_eq!(capped, raw.min(cap), "index {} cap {} out {:?}", i, cap, out);
            }
        }

        #[test]
        fn capped_prefix_sums_arbitrary_floats(
            rewards in prop::collection::vec(-50.0..50.0_f64, 0..64),
            cap in -200.0..200.0_f64,
        ) {
            let out = cap_rewards(&rewards, cap).unwrap();
            let (mut raw, mut capped) = (0.0_f64, 0.0_f64);
            for (r, a) in rewards.iter().zip(&out) {
                raw += r;
                capped += a;
                prop_assert!((capped - raw.min(cap)).abs() <= 1e-12 * (1.0 + raw.abs() + cap.abs()));
            }
        }

        #[test]
        fn cap_above_total_is_identity(rewards in prop::collection::vec(0.0..10.0_f64, 0..32)) {
            let total: f64 = rewards.iter().sum();
            let out = cap_rewards(&rewards, total + 1.0).unwrap();
            prop_assert_eq!(out, rewards);
        }

        #[test]
        fn empirical_matches_exact_on_distinct_samples(
            n in 1usize..60,
            k_frac in 0.0..1.0_f64,
            seed in any::<u64>(),
        ) {
            // Distinct values, alpha·N integral.
            let k = 1 + ((n - 1) as f64 * k_frac) as usize;
            let alpha = k as f64 / n as f64;
            let samples: Vec<f64> = (0..n)
                .map(|i| ((i as u64).wrapping_mul(seed | 1) % 1_000_003) as f64 + i as f64 * 1e-3)
                .collect();
            let b = ReturnBatch::new(samples.clone(), alpha).unwrap();
            let d = ExactDistribution::from_samples(&samples).unwrap();
            let (var, cvar) = exact_var_cvar(&d, alpha).unwrap();
            prop_assert_eq!(b.var(), var);
            prop_assert!((b.cvar() - cvar).abs() <= 1e-9 * (1.0 + cvar.abs()));
        }
    }
}
