use rand::Rng;

/// Softmax probabilities and log-probabilities of `logits`.
///
/// The maximum logit is subtracted first, so logits of any finite magnitude
/// produce a valid distribution.
pub fn categorical_head(logits: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let log_total = total.ln();
    let probs = exps.iter().map(|e| e / total).collect();
    let log_probs = logits.iter().map(|z| z - max - log_total).collect();
    (probs, log_probs)
}

/// `-Σ p log p`.
pub fn entropy(probs: &[f64], log_probs: &[f64]) -> f64 {
    -probs.iter().zip(log_probs).map(|(p, lp)| p * lp).sum::<f64>()
}

/// Inverse-CDF draw from a categorical distribution.
pub fn sample_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
        }
        cum += p;
        if u < cum {
            return i;
        }
    }
    // u landed in the rounding gap above the final cumulative sum.
    last_positive
}
